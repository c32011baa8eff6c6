"""Golden complexes and spaces shared by the test suite.

Every surface here is validated combinatorially on construction (each edge
in exactly two triangles, no degenerate or duplicate faces), so the frozen
cohomology assertions in the tests really test the linear algebra.
"""

import random

from normhom.abelian import FGAbelianGroup
from normhom.complexes import IntegerCochainComplex, validate_complex
from normhom.coverings import SimplicialComplexRep, simplicial_cochain_complex
from normhom.intlinalg import IntMatrix, kernel_basis


def complex_from_facets(facets) -> IntegerCochainComplex:
    verts = sorted({v for f in facets for v in f})
    rep = SimplicialComplexRep(tuple(verts), tuple(tuple(sorted(f)) for f in facets))
    return simplicial_cochain_complex(rep)


def _check_closed_surface(facets):
    from collections import Counter

    edge_count = Counter()
    seen = set()
    for f in facets:
        assert len(set(f)) == 3, f"degenerate face {f}"
        key = tuple(sorted(f))
        assert key not in seen, f"duplicate face {f}"
        seen.add(key)
        a, b, c = sorted(f)
        for e in ((a, b), (a, c), (b, c)):
            edge_count[e] += 1
    assert all(v == 2 for v in edge_count.values()), "not a closed surface"
    return len(seen), len(edge_count)


def point_complex() -> IntegerCochainComplex:
    return IntegerCochainComplex.single(0, 1)


def circle_complex() -> IntegerCochainComplex:
    return complex_from_facets([(0, 1), (1, 2), (0, 2)])


def sphere_complex() -> IntegerCochainComplex:
    facets = [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]
    return complex_from_facets(facets)


def torus_facets():
    faces = []
    for i in range(7):
        faces.append(tuple(sorted(((i) % 7, (i + 1) % 7, (i + 3) % 7))))
        faces.append(tuple(sorted(((i) % 7, (i + 2) % 7, (i + 3) % 7))))
    nf, ne = _check_closed_surface(faces)
    assert (nf, ne) == (14, 21)
    return faces


def torus_complex() -> IntegerCochainComplex:
    return complex_from_facets(torus_facets())


def rp2_facets():
    faces = [(1, 2, 3), (1, 2, 4), (1, 3, 5), (1, 4, 6), (1, 5, 6),
             (2, 3, 6), (2, 4, 5), (2, 5, 6), (3, 4, 5), (3, 4, 6)]
    nf, ne = _check_closed_surface(faces)
    assert (nf, ne) == (10, 15)
    return faces


def rp2_complex() -> IntegerCochainComplex:
    return complex_from_facets(rp2_facets())


def klein_facets():
    """Klein bottle from a 4x4 grid with an orientation-reversing wrap."""
    w = 4

    def v(i, j):
        i %= w
        if j >= w:
            j = 0
            i = (-i) % w
        return i + w * j

    faces = []
    for i in range(w):
        for j in range(w):
            a = v(i, j)
            b = v(i + 1, j)
            c = v(i, j + 1)
            d = v(i + 1, j + 1)
            faces.append(tuple(sorted((a, b, d))))
            faces.append(tuple(sorted((a, d, c))))
    nf, ne = _check_closed_surface(faces)
    assert nf == 2 * w * w
    assert len({x for f in faces for x in f}) - ne + nf == 0  # Euler characteristic
    return faces


def klein_complex() -> IntegerCochainComplex:
    return complex_from_facets(klein_facets())


GOLDEN = {
    "point": point_complex,
    "circle": circle_complex,
    "sphere": sphere_complex,
    "torus": torus_complex,
    "rp2": rp2_complex,
    "klein": klein_complex,
}

COEFFS = [
    FGAbelianGroup.free(1),
    FGAbelianGroup.cyclic(2),
    FGAbelianGroup.cyclic(4),
    FGAbelianGroup.cyclic(6),
    FGAbelianGroup(1, (2,)),
]


def random_valid_complex(rng: random.Random, max_rank: int = 6, bound: int = 3) -> IntegerCochainComplex:
    """Random three-degree complex with delta o delta = 0 and small entries.

    delta0 is arbitrary; delta1 is drawn from the integer kernel of the
    transposed composition constraint, rejecting entries out of range.
    """
    r0 = rng.randint(0, max_rank)
    r1 = rng.randint(1, max_rank)
    r2 = rng.randint(0, max_rank)
    d0 = [[rng.randint(-bound, bound) for _ in range(r0)] for _ in range(r1)]
    if r2 == 0:
        d1 = []
    else:
        ker = kernel_basis([[d0[i][j] for i in range(r1)] for j in range(r0)], r1) \
            if r0 else [[1 if i == j else 0 for i in range(r1)] for j in range(r1)]
        d1 = []
        for _ in range(r2):
            for _attempt in range(40):
                row = [0] * r1
                if ker:
                    picks = rng.randint(1, min(2, len(ker)))
                    for _ in range(picks):
                        vec = rng.choice(ker)
                        coef = rng.choice([-1, 1])
                        row = [x + coef * y for x, y in zip(row, vec)]
                if all(abs(x) <= bound for x in row):
                    break
            else:
                row = [0] * r1
            d1.append(row)
    deltas = [IntMatrix.from_rows(d0, r0)]
    deltas.append(IntMatrix.from_rows(d1, r1))
    c = IntegerCochainComplex(0, (r0, r1, r2), tuple(deltas))
    validate_complex(c)
    return c
