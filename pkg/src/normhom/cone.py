"""Mapping cones Hom(C^n;G') (+) Hom(C^{n+1};G'') and their homology.

The divisible coefficients are never materialized.  Every computation runs
in bounded-denominator submodules: at "level" (F, T) the Q coordinates live
in (1/F)Z (stored as integer numerators) and the torus coordinates in
(1/T)Z/Z ~ Z/T.  The homology of the true cone is the filtered colimit of
the level homologies along the inclusion maps (multiplication by the level
ratio), so each saturation stage computes the *image* of one level's
homology inside the next.  Stages must agree three times before a value is
accepted; disagreement raises ``SaturationFailure``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .abelian import (
    FGAbelianGroup,
    InjectiveResolution,
    MixedModuleElement,
    SubgroupInfo,
    group_from_relations,
    presented_kernel,
    subgroup_form,
    subgroups_equal,
)
from .complexes import CochainHomotopy, CochainMap, IntegerCochainComplex, validate_complex
from .errors import (
    NotExact,
    ResolutionMismatch,
    SaturationFailure,
    ShapeMismatch,
)
from .intlinalg import (
    IntMatrix,
    invariant_factors,
    kernel_basis,
    matmul,
    solve,
    solve_matrix,
)


@dataclass(frozen=True)
class ConeComplex:
    """The chain complex with C_n = Hom(C^n;G') (+) Hom(C^{n+1};G'').

    Coordinates in degree n are laid out as: the Q part of phi' (one block
    of ``q_rank`` per generator of C^n), then the torus part of phi', then
    all of phi'' (``g2_rank`` per generator of C^{n+1}).
    """

    base: IntegerCochainComplex
    resolution: InjectiveResolution

    def __post_init__(self):
        validate_complex(self.base)

    @property
    def lo(self) -> int:
        return self.base.lo - 1

    @property
    def hi(self) -> int:
        return self.base.hi

    def free_count(self, n: int) -> int:
        return self.base.rank(n) * self.resolution.q_rank

    def torus_count(self, n: int) -> int:
        r = self.resolution
        return self.base.rank(n) * r.t_rank + self.base.rank(n + 1) * r.g2_rank

    def dim(self, n: int) -> int:
        return self.free_count(n) + self.torus_count(n)

    # flat coordinate indexing -------------------------------------------------
    def idx_free(self, n: int, i: int, k: int) -> int:
        return i * self.resolution.q_rank + k

    def idx_phi1_torus(self, n: int, i: int, l: int) -> int:
        return self.free_count(n) + i * self.resolution.t_rank + l

    def idx_phi2(self, n: int, j: int, m: int) -> int:
        return (self.free_count(n) + self.base.rank(n) * self.resolution.t_rank
                + j * self.resolution.g2_rank + m)

    def boundary_level_matrix(self, n: int) -> list[list[int]]:
        """Integer matrix of the boundary C_n -> C_{n-1} at any level.

        The free -> torus block (beta on Q parts) is scaled by the
        resolution denominator E, matching the convention T = E * F.
        """
        res = self.resolution
        a, b, g2, e = res.q_rank, res.t_rank, res.g2_rank, res.denominator
        cn = self.base.rank(n)
        cn1 = self.base.rank(n + 1)
        rows = self.dim(n - 1)
        cols = self.dim(n)
        out = [[0] * cols for _ in range(rows)]
        d_prev = self.base.delta(n - 1)  # C^{n-1} -> C^n, shape cn x c_{n-1}
        d_n = self.base.delta(n)         # C^n -> C^{n+1}, shape cn1 x cn
        # phi' o delta^{n-1}: free->free and phi' torus->phi' torus
        for ip in range(self.base.rank(n - 1)):
            for i in range(cn):
                coef = d_prev.entries[i][ip]
                if coef:
                    for k in range(a):
                        out[self.idx_free(n - 1, ip, k)][self.idx_free(n, i, k)] += coef
                    for l in range(b):
                        out[self.idx_phi1_torus(n - 1, ip, l)][self.idx_phi1_torus(n, i, l)] += coef
        # second component: beta o phi' - phi'' o delta^n lands in Hom(C^n;G'')
        for j in range(cn):
            for m in range(g2):
                row = self.idx_phi2(n - 1, j, m)
                for k in range(a):
                    coef = res.beta_q[m][k] * e
                    if coef:
                        out[row][self.idx_free(n, j, k)] += int(coef)
                for l in range(b):
                    coef = res.beta_t[m][l]
                    if coef:
                        out[row][self.idx_phi1_torus(n, j, l)] += coef
            for j2 in range(cn1):
                coef = d_n.entries[j2][j]
                if coef:
                    for m in range(g2):
                        out[self.idx_phi2(n - 1, j, m)][self.idx_phi2(n, j2, m)] -= coef
        return out

    def boundary_rational_matrix(self, n: int) -> list[list[Fraction]]:
        """Exact rational boundary matrix (free columns carry 1/E scaling)."""
        e = Fraction(self.resolution.denominator)
        lvl = self.boundary_level_matrix(n)
        fc = self.free_count(n)
        rows = []
        fc_prev = self.free_count(n - 1)
        for r, row in enumerate(lvl):
            out = []
            for c, x in enumerate(row):
                v = Fraction(x)
                if c < fc and r >= fc_prev:
                    v = v / e
                out.append(v)
            rows.append(out)
        return rows


def dualize(c: IntegerCochainComplex, r: InjectiveResolution) -> ConeComplex:
    """Build the cone of beta_# : Hom(C;G') -> Hom(C;G'')."""
    return ConeComplex(c, r)


@dataclass(frozen=True)
class ConeElement:
    """Exact element (phi', phi'') of the cone in a fixed degree."""

    phi_prime: tuple[MixedModuleElement, ...]
    phi_double_prime: tuple[MixedModuleElement, ...]


def cone_zero_element(k: ConeComplex, n: int) -> ConeElement:
    res = k.resolution
    return ConeElement(
        tuple(MixedModuleElement.zero(res.q_rank, res.t_rank) for _ in range(k.base.rank(n))),
        tuple(MixedModuleElement.zero(0, res.g2_rank) for _ in range(k.base.rank(n + 1))),
    )


def cone_boundary_apply(k: ConeComplex, n: int, x: ConeElement) -> ConeElement:
    """Exact boundary (phi' o delta, beta o phi' - phi'' o delta)."""
    res = k.resolution
    cn = k.base.rank(n)
    cn1 = k.base.rank(n + 1)
    if len(x.phi_prime) != cn or len(x.phi_double_prime) != cn1:
        raise ShapeMismatch(f"element does not match degree {n} (expected {cn}, {cn1} blocks)")
    for el in x.phi_prime:
        if len(el.rational_block) != res.q_rank or len(el.torus_block) != res.t_rank:
            raise ShapeMismatch("phi' blocks do not match the resolution")
    for el in x.phi_double_prime:
        if len(el.rational_block) != 0 or len(el.torus_block) != res.g2_rank:
            raise ShapeMismatch("phi'' blocks do not match the resolution")
    d_prev = k.base.delta(n - 1)
    first = []
    for ip in range(k.base.rank(n - 1)):
        acc = MixedModuleElement.zero(res.q_rank, res.t_rank)
        for i in range(cn):
            coef = d_prev.entries[i][ip]
            if coef:
                acc = acc + x.phi_prime[i].scale(coef)
        first.append(acc)
    d_n = k.base.delta(n)
    second = []
    from .abelian import apply_beta

    for j in range(cn):
        acc = apply_beta(res, x.phi_prime[j])
        for j2 in range(cn1):
            coef = d_n.entries[j2][j]
            if coef:
                acc = acc + x.phi_double_prime[j2].scale(-coef)
        second.append(acc)
    return ConeElement(tuple(first), tuple(second))


# ---------------------------------------------------------------------------
# saturation engine


def default_base_modulus(k: ConeComplex) -> int:
    prod = 1
    for n in range(k.base.lo, k.base.hi):
        for d in invariant_factors(k.base.delta(n).tolists()):
            if d:
                prod *= d
    g = k.resolution.base
    prod *= g.exponent()
    return 2 * max(1, prod)


@dataclass
class StableHomology:
    """Stable (colimit) homology of one cone degree with explicit cycles."""

    degree: int
    form: FGAbelianGroup
    dim: int                       # ambient coordinate count at this degree
    basis: list[list[int]]         # cycle representatives at the top level
    rel_cols: list[list[int]]      # relations among the basis (presentation)
    ambient_rels: list[list[int]]  # boundaries + modulus relations at top level
    level_f: int                   # Q-denominator of the accepted level
    level_t: int                   # torus modulus of the accepted level
    stage_forms: tuple[FGAbelianGroup, ...]

    def class_coords(self, vec: list[int]) -> list[int] | None:
        """Coordinates of a cycle's class in the basis, or None if the class
        lies outside the stable subgroup."""
        if not self.basis:
            return [] if True else None
        span = self.basis + self.ambient_rels
        sol = solve([[col[i] for col in span] for i in range(self.dim)], list(vec))
        if sol is None:
            return None
        return sol[: len(self.basis)]


class ConeHomologyEngine:
    """Shared level stack for all degrees of one cone.

    ``base_modulus`` overrides (by lcm) the automatically derived modulus;
    raising it must never change any reported group.
    """

    def __init__(self, cone: ConeComplex, base_modulus: int | None = None):
        self.cone = cone
        auto = default_base_modulus(cone)
        if base_modulus:
            auto = auto * (base_modulus // gcd(auto, base_modulus))
        self.base = max(2, auto)
        self.levels = [self.base, self.base ** 2, self.base ** 3]
        self._bnd: dict[int, list[list[int]]] = {}
        self._stable: dict[int, StableHomology] = {}

    def boundary(self, n: int) -> list[list[int]]:
        if n not in self._bnd:
            self._bnd[n] = self.cone.boundary_level_matrix(n)
        return self._bnd[n]

    def _torus_relation_cols(self, n: int, t_mod: int) -> list[list[int]]:
        dim = self.cone.dim(n)
        fc = self.cone.free_count(n)
        cols = []
        for t in range(fc, dim):
            col = [0] * dim
            col[t] = t_mod
            cols.append(col)
        return cols

    def _cycle_gens(self, n: int, t_mod: int) -> list[list[int]]:
        dim = self.cone.dim(n)
        if dim == 0:
            return []
        out_dim = self.cone.dim(n - 1)
        if out_dim == 0:
            return [[1 if i == j else 0 for i in range(dim)] for j in range(dim)]
        bnd = self.boundary(n)
        aug_cols = dim + self.cone.torus_count(n - 1)
        fc_prev = self.cone.free_count(n - 1)
        aug = []
        for r in range(out_dim):
            row = bnd[r][:]
            for t in range(self.cone.torus_count(n - 1)):
                row.append(t_mod if fc_prev + t == r else 0)
            aug.append(row)
        ker = kernel_basis(aug, aug_cols)
        return [v[:dim] for v in ker]

    def stable(self, n: int) -> StableHomology:
        if n in self._stable:
            return self._stable[n]
        dim = self.cone.dim(n)
        if dim == 0:
            res = StableHomology(n, FGAbelianGroup.trivial(), 0, [], [], [],
                                 self.levels[-1], self.levels[-1] * self.cone.resolution.denominator,
                                 (FGAbelianGroup.trivial(),) * 3)
            self._stable[n] = res
            return res
        e = self.cone.resolution.denominator
        f1, f2, f3 = self.levels
        k1 = self._cycle_gens(n, e * f1)
        k2 = self._cycle_gens(n, e * f2)
        k3 = self._cycle_gens(n, e * f3)
        bnd_in = self.boundary(n + 1)
        bcols = [[bnd_in[r][c] for r in range(dim)] for c in range(self.cone.dim(n + 1))]

        def ambient_rels(t_mod):
            return self._torus_relation_cols(n, t_mod) + bcols

        rel2 = ambient_rels(e * f2)
        rel3 = ambient_rels(e * f3)
        b21 = f2 // f1
        b31 = f3 // f1
        b32 = f3 // f2
        v1 = subgroup_form(dim, rel2, [[x * b21 for x in v] for v in k1])
        v2 = subgroup_form(dim, rel3, [[x * b31 for x in v] for v in k1])
        v3 = subgroup_form(dim, rel3, [[x * b32 for x in v] for v in k2])
        forms = (v1.form, v2.form, v3.form)
        if not (v1.form == v2.form == v3.form):
            raise SaturationFailure(
                f"saturation stages disagree at degree {n}: "
                f"{v1.form} / {v2.form} / {v3.form} (base modulus {self.base})"
            )
        # sanity: the top level itself reproduces the stable form
        res = StableHomology(
            degree=n,
            form=v3.form,
            dim=dim,
            basis=[list(b) for b in v3.basis],
            rel_cols=[[v3.rel_coords[i][j] for i in range(len(v3.basis))]
                      for j in range(len(v3.rel_coords[0]) if v3.rel_coords else 0)],
            ambient_rels=rel3,
            level_f=f3,
            level_t=e * f3,
            stage_forms=forms,
        )
        self._stable[n] = res
        return res


def cone_homology(k: ConeComplex, n: int, base_modulus: int | None = None) -> FGAbelianGroup:
    """Canonical form of H_n of the cone via the saturation protocol."""
    if n < k.lo or n > k.hi:
        return FGAbelianGroup.trivial()
    return ConeHomologyEngine(k, base_modulus).stable(n).form


# ---------------------------------------------------------------------------
# maps between cones


@dataclass
class ConeMap:
    """Chain map between cones given by one integer matrix per degree."""

    source: ConeComplex
    target: ConeComplex
    matrices: dict[int, list[list[int]]]

    def matrix(self, n: int) -> list[list[int]]:
        if n in self.matrices:
            return self.matrices[n]
        return [[0] * self.source.dim(n) for _ in range(self.target.dim(n))]

    def verify_chain_map(self) -> bool:
        lo = min(self.source.lo, self.target.lo)
        hi = max(self.source.hi, self.target.hi)
        for n in range(lo, hi + 1):
            lhs = matmul(self.target.boundary_level_matrix(n), self.matrix(n),
                         self.target.dim(n), self.source.dim(n))
            rhs = matmul(self.matrix(n - 1), self.source.boundary_level_matrix(n),
                         self.source.dim(n - 1), self.source.dim(n))
            if lhs != rhs:
                return False
        return True

    def compose(self, inner: "ConeMap") -> "ConeMap":
        lo = min(self.target.lo, inner.source.lo)
        hi = max(self.target.hi, inner.source.hi)
        mats = {}
        for n in range(lo, hi + 1):
            mats[n] = matmul(self.matrix(n), inner.matrix(n), self.source.dim(n),
                             inner.source.dim(n))
        return ConeMap(inner.source, self.target, mats)


def induced_cone_map(f: CochainMap, r: InjectiveResolution) -> ConeMap:
    """Contravariant induced map Cone(target of f) -> Cone(source of f)."""
    src_cone = ConeComplex(f.target, r)
    tgt_cone = ConeComplex(f.source, r)
    a, b, g2 = r.q_rank, r.t_rank, r.g2_rank
    mats = {}
    for n in range(tgt_cone.lo, tgt_cone.hi + 1):
        rows = tgt_cone.dim(n)
        cols = src_cone.dim(n)
        m = [[0] * cols for _ in range(rows)]
        fn = f.component(n)
        fn1 = f.component(n + 1)
        for i in range(f.source.rank(n)):
            for ip in range(f.target.rank(n)):
                coef = fn.entries[ip][i]
                if coef:
                    for kk in range(a):
                        m[tgt_cone.idx_free(n, i, kk)][src_cone.idx_free(n, ip, kk)] += coef
                    for l in range(b):
                        m[tgt_cone.idx_phi1_torus(n, i, l)][src_cone.idx_phi1_torus(n, ip, l)] += coef
        for j in range(f.source.rank(n + 1)):
            for jp in range(f.target.rank(n + 1)):
                coef = fn1.entries[jp][j]
                if coef:
                    for mm in range(g2):
                        m[tgt_cone.idx_phi2(n, j, mm)][src_cone.idx_phi2(n, jp, mm)] += coef
        mats[n] = m
    return ConeMap(src_cone, tgt_cone, mats)


@dataclass
class ConeHomotopyLift:
    """Degree +1 maps between cones satisfying Dbar d' + d Dbar = f# - g#."""

    source: ConeComplex
    target: ConeComplex
    matrices: dict[int, list[list[int]]]  # degree n: source C_n -> target C_{n+1}

    def matrix(self, n: int) -> list[list[int]]:
        if n in self.matrices:
            return self.matrices[n]
        return [[0] * self.source.dim(n) for _ in range(self.target.dim(n + 1))]


def homotopy_lift(d: CochainHomotopy, r: InjectiveResolution) -> ConeHomotopyLift:
    """Lift a cochain homotopy to the cones and verify the chain identity."""
    f, g = d.f, d.g
    src_cone = ConeComplex(f.target, r)   # cones are contravariant
    tgt_cone = ConeComplex(f.source, r)
    a, b, g2 = r.q_rank, r.t_rank, r.g2_rank
    mats = {}
    for n in range(src_cone.lo - 1, src_cone.hi + 1):
        rows = tgt_cone.dim(n + 1)
        cols = src_cone.dim(n)
        m = [[0] * cols for _ in range(rows)]
        dn1 = d.component(n + 1)  # C^{n+1} -> C'^n
        dn2 = d.component(n + 2)  # C^{n+2} -> C'^{n+1}
        for i in range(f.source.rank(n + 1)):
            for ip in range(f.target.rank(n)):
                coef = dn1.entries[ip][i]
                if coef:
                    for kk in range(a):
                        m[tgt_cone.idx_free(n + 1, i, kk)][src_cone.idx_free(n, ip, kk)] += coef
                    for l in range(b):
                        m[tgt_cone.idx_phi1_torus(n + 1, i, l)][src_cone.idx_phi1_torus(n, ip, l)] += coef
        for j in range(f.source.rank(n + 2)):
            for jp in range(f.target.rank(n + 1)):
                coef = dn2.entries[jp][j]
                if coef:
                    for mm in range(g2):
                        m[tgt_cone.idx_phi2(n + 1, j, mm)][src_cone.idx_phi2(n, jp, mm)] -= coef
        mats[n] = m
    lift = ConeHomotopyLift(src_cone, tgt_cone, mats)
    f_map = induced_cone_map(f, r)
    g_map = induced_cone_map(g, r)
    for n in range(src_cone.lo, src_cone.hi + 1):
        lhs1 = matmul(lift.matrix(n - 1), src_cone.boundary_level_matrix(n),
                      src_cone.dim(n - 1), src_cone.dim(n))
        lhs2 = matmul(tgt_cone.boundary_level_matrix(n + 1), lift.matrix(n),
                      tgt_cone.dim(n + 1), src_cone.dim(n))
        fm = f_map.matrix(n)
        gm = g_map.matrix(n)
        rows = tgt_cone.dim(n)
        cols = src_cone.dim(n)
        for i in range(rows):
            for j in range(cols):
                if lhs1[i][j] + lhs2[i][j] != fm[i][j] - gm[i][j]:
                    raise ShapeMismatch(f"cone homotopy identity fails at degree {n}")
    return lift


def induced_map_on_stable(m: ConeMap, src_engine: ConeHomologyEngine,
                          tgt_engine: ConeHomologyEngine, n: int) -> list[list[int]]:
    """Columns of the induced map between stable homologies in degree n.

    Both engines must share the same level stack.
    """
    if src_engine.levels != tgt_engine.levels:
        raise ResolutionMismatch("engines must share the saturation levels")
    src = src_engine.stable(n)
    tgt = tgt_engine.stable(n)
    cols = []
    mat = m.matrix(n)
    for vec in src.basis:
        img = [sum(mat[i][j] * vec[j] for j in range(len(vec))) for i in range(len(mat))] \
            if mat else [0] * tgt.dim
        coords = tgt.class_coords(img)
        if coords is None:
            raise ArithmeticError("image of a stable class left the stable subgroup")
        cols.append(coords)
    return cols
