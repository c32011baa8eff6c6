import random

import pytest

from normhom.abelian import FGAbelianGroup, ext, hom
from normhom.complexes import CochainHomotopy, CochainMap, IntegerCochainComplex, cohomology_all
from normhom.coverings import CoveringPair, FiniteCoveredSpace
from normhom.intlinalg import IntMatrix
from normhom.normal_homology import (
    dimension_check,
    homology,
    homotopy_axiom_check,
    normal_cochain_complex,
    pair_sequence_check,
    resolution_independence_check,
    ucf_check,
    ucf_check_all,
)

from corpus import (
    COEFFS,
    GOLDEN,
    circle_complex,
    point_complex,
    random_valid_complex,
    rp2_complex,
    torus_complex,
)
from test_complexes import prism_homotopy_example

Z = FGAbelianGroup.free(1)
Z2 = FGAbelianGroup.cyclic(2)
T = FGAbelianGroup.trivial()


def test_normal_cochain_complex_point():
    s = FiniteCoveredSpace(points=("p",), coverings={"c": [("p",)]})
    c = normal_cochain_complex(s, "c")
    assert c.ranks == (1,)


def test_normal_cochain_complex_circle():
    s = FiniteCoveredSpace(points=(0, 1, 2, 3, 4, 5),
                           coverings={"arcs": [(0, 1, 2), (2, 3, 4), (4, 5, 0)]})
    c = normal_cochain_complex(s, "arcs")
    forms = cohomology_all(c)
    assert forms[0] == Z and forms[1] == Z


def test_normal_cochain_complex_pair():
    s = FiniteCoveredSpace(points=(0, 1, 2), closed=(0, 2),
                           coverings={"edges": [(0, 1), (1, 2)]})
    p = CoveringPair(alpha="edges", beta=((0,), (2,)), witness=(0, 1))
    c = normal_cochain_complex(s, p)
    assert cohomology_all(c)[1] == Z


def test_homology_point_examples():
    c = point_complex()
    assert homology(c, FGAbelianGroup.cyclic(4), 0).group == FGAbelianGroup.cyclic(4)
    assert homology(c, Z, 1).group == T
    assert homology(c, Z, -1).group == T


def test_homology_rp2():
    assert homology(rp2_complex(), Z, 1).group == Z2


def test_homology_provenance_moduli():
    res = homology(point_complex(), Z2, 0)
    assert len(res.provenance_modulus) == 3
    m0 = res.provenance_modulus[0]
    assert res.provenance_modulus == (m0, m0 ** 2, m0 ** 3)


def test_ucf_rp2():
    rep = ucf_check(rp2_complex(), Z, 1)
    assert rep.hom_part == T
    assert rep.ext_part == Z2
    assert rep.homology_group == Z2
    assert rep.passed


def test_ucf_torus():
    rep = ucf_check(torus_complex(), Z, 1)
    assert rep.hom_part == FGAbelianGroup.free(2)
    assert rep.ext_part == T
    assert rep.homology_group == FGAbelianGroup.free(2)
    assert rep.passed


def test_ucf_circle_mod6():
    rep = ucf_check(circle_complex(), FGAbelianGroup.cyclic(6), 1)
    assert rep.hom_part == FGAbelianGroup.cyclic(6)
    assert rep.ext_part == T
    assert rep.homology_group == FGAbelianGroup.cyclic(6)
    assert rep.passed


@pytest.mark.parametrize("name", sorted(GOLDEN))
def test_ucf_golden_with_mixed_coefficients(name):
    c = GOLDEN[name]()
    g = FGAbelianGroup(1, (2,))
    for rep in ucf_check_all(c, g, range(c.lo - 1, c.hi + 2)):
        assert rep.passed, (name, rep.degree)


def test_ucf_random_spot():
    rng = random.Random(777)
    for _ in range(4):
        c = random_valid_complex(rng, max_rank=4)
        for rep in ucf_check_all(c, FGAbelianGroup.cyclic(4), range(-1, 4)):
            assert rep.passed


def test_homology_rank_torsion_shadow():
    """rank H_n = rank Hom(H^n;G); |torsion H_n| = |Ext(H^{n+1};G)| * |torsion Hom(H^n;G)|."""
    for name in GOLDEN:
        c = GOLDEN[name]()
        forms = cohomology_all(c)
        for g in COEFFS:
            for n in range(c.lo - 1, c.hi + 1):
                got = homology(c, g, n).group
                hn = forms.get(n, T)
                hn1 = forms.get(n + 1, T)
                hp = hom(hn, g)
                ep = ext(hn1, g)
                assert got.rank == hp.rank
                assert got.torsion_order() == hp.torsion_order() * ep.torsion_order()


def test_pair_sequence_disk_boundary():
    s = FiniteCoveredSpace(points=(0, 1, 2), closed=(0, 1, 2),
                           coverings={"whole": [(0, 1, 2)]})
    pair = CoveringPair(alpha="whole", beta=((0, 1), (1, 2), (0, 2)), witness=(0, 0, 0))
    rep = pair_sequence_check(s, pair, Z)
    assert rep.all_exact
    groups = {(n.label, n.degree): n.group for n in rep.nodes}
    assert groups[("(X,A)", 2)] == Z
    assert groups[("A", 1)] == Z


def test_pair_sequence_empty_subspace():
    s = FiniteCoveredSpace(points=(0, 1), coverings={"whole": [(0, 1)]})
    pair = CoveringPair(alpha="whole", beta=(), witness=())
    rep = pair_sequence_check(s, pair, Z)
    assert rep.all_exact
    groups = {(n.label, n.degree): n.group for n in rep.nodes}
    assert groups[("A", 0)] == T
    assert groups[("X", 0)] == groups[("(X,A)", 0)] == Z


def test_pair_sequence_whole_subspace():
    s = FiniteCoveredSpace(points=(0, 1), closed=(0, 1),
                           coverings={"whole": [(0, 1)]})
    pair = CoveringPair(alpha="whole", beta=((0, 1),), witness=(0,))
    rep = pair_sequence_check(s, pair, Z)
    assert rep.all_exact
    for node in rep.nodes:
        if node.label == "(X,A)":
            assert node.group == T


def test_dimension_check_examples():
    rep = dimension_check(Z)
    assert rep.passed
    assert rep.values[0] == Z and rep.values[1] == T
    rep2 = dimension_check(FGAbelianGroup(1, (2,)))
    assert rep2.passed and rep2.values[0] == FGAbelianGroup(1, (2,))
    rep3 = dimension_check(T)
    assert rep3.passed and all(v == T for v in rep3.values.values())


def test_dimension_check_random_groups():
    rng = random.Random(42)
    for _ in range(8):
        g = FGAbelianGroup.from_factors(
            rng.randint(0, 2), [rng.choice([2, 3, 4, 6, 9]) for _ in range(rng.randint(0, 2))])
        assert dimension_check(g).passed


def test_homotopy_axiom_prism():
    fmap, gmap, homotopy = prism_homotopy_example()
    rep = homotopy_axiom_check(homotopy, Z)
    assert rep.passed


def test_homotopy_axiom_equal_maps():
    c = circle_complex()
    f = CochainMap.identity(c)
    d = CochainHomotopy(f, f, {})
    assert homotopy_axiom_check(d, FGAbelianGroup.cyclic(6)).passed


def test_resolution_independence():
    assert resolution_independence_check(point_complex(), Z, 0).passed
    assert resolution_independence_check(rp2_complex(), Z, 1).passed
    assert resolution_independence_check(circle_complex(), FGAbelianGroup.cyclic(6), 1).passed
    assert resolution_independence_check(torus_complex(), FGAbelianGroup(1, (2,)), 1).passed
