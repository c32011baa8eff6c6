"""Short exact sequences of complexes and of coefficient groups, and the
long exact homology sequences they induce on cones.

Exactness of every junction is verified exactly: the image of the incoming
map and the kernel of the outgoing map are compared as subgroups of the
stable homology presentation.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from math import gcd

from .abelian import (
    FGAbelianGroup,
    InjectiveResolution,
    MixedModuleElement,
    apply_beta,
    canonical_relation_cols,
    group_from_relations,
    hom_matrix_error,
    presented_kernel,
    resolve_injective,
    subgroup_form,
    subgroups_equal,
)
from .complexes import CochainMap, IntegerCochainComplex
from .cone import (
    ConeComplex,
    ConeHomologyEngine,
    ConeMap,
    default_base_modulus,
    induced_cone_map,
    induced_map_on_stable,
)
from .errors import NotExact, NotExactCoefficients
from .intlinalg import (
    IntMatrix,
    invariant_factors,
    kernel_basis,
    lcm,
    matmul,
    solve,
    solve_matrix,
    solve_rational,
    solve_mod,
)


@dataclass(frozen=True)
class CochainSES:
    """0 -> sub -> mid -> quo -> 0, degree-wise exact, all terms free."""

    sub: IntegerCochainComplex
    mid: IntegerCochainComplex
    quo: IntegerCochainComplex
    inj: CochainMap
    surj: CochainMap

    def __post_init__(self):
        if self.inj.source != self.sub or self.inj.target != self.mid:
            raise NotExact("inj", "inj must map sub -> mid")
        if self.surj.source != self.mid or self.surj.target != self.quo:
            raise NotExact("surj", "surj must map mid -> quo")
        lo = min(self.sub.lo, self.mid.lo, self.quo.lo)
        hi = max(self.sub.hi, self.mid.hi, self.quo.hi)
        for n in range(lo, hi + 1):
            fm = self.inj.component(n).tolists()
            gm = self.surj.component(n).tolists()
            if self.sub.rank(n) and kernel_basis(fm, self.sub.rank(n)):
                raise NotExact(n, f"inclusion is not injective at degree {n}")
            facs = invariant_factors(gm)
            if len(facs) != self.quo.rank(n) or any(d != 1 for d in facs):
                raise NotExact(n, f"projection is not onto at degree {n}")
            ker = kernel_basis(gm, self.mid.rank(n)) if self.mid.rank(n) else []
            fcols = [[fm[i][j] for i in range(self.mid.rank(n))]
                     for j in range(self.sub.rank(n))]
            kmat = [[col[i] for col in ker] for i in range(self.mid.rank(n))]
            fmat = [[col[i] for col in fcols] for i in range(self.mid.rank(n))]
            if fcols and (not ker or solve_matrix(kmat, fmat, len(ker)) is None):
                raise NotExact(n, f"image not contained in kernel at degree {n}")
            if ker and (not fcols or solve_matrix(fmat, kmat, len(fcols)) is None):
                raise NotExact(n, f"kernel not contained in image at degree {n}")


@dataclass(frozen=True)
class LESNode:
    label: str
    degree: int
    group: FGAbelianGroup


@dataclass
class LongExactSequenceReport:
    nodes: tuple[LESNode, ...]
    # maps[i] sends nodes[i] -> nodes[i+1]; columns are target coordinates
    maps: tuple[tuple[tuple[int, ...], ...], ...]
    map_is_zero: tuple[bool, ...]
    exact_at: tuple[bool, ...]  # one verdict per interior node
    all_exact: bool

    def summary_lines(self):
        out = []
        for i, node in enumerate(self.nodes):
            mark = ""
            if 0 < i < len(self.nodes) - 1:
                mark = "  [exact]" if self.exact_at[i - 1] else "  [NOT EXACT]"
            out.append(f"{node.label:>12} deg {node.degree:>3}: {node.group}{mark}")
        return out


def _cone_map_from_components(src_cone: ConeComplex, tgt_cone: ConeComplex,
                              comp) -> ConeMap:
    """Module map between cones from per-degree pairs (h^n, h^{n+1}) acting
    by (phi' o h^n, phi'' o h^{n+1}).  ``comp(n)`` returns the matrix of
    h^n : (tgt base)^n -> (src base)^n as lists."""
    r = src_cone.resolution
    a, b, g2 = r.q_rank, r.t_rank, r.g2_rank
    mats = {}
    for n in range(min(src_cone.lo, tgt_cone.lo), max(src_cone.hi, tgt_cone.hi) + 1):
        rows = tgt_cone.dim(n)
        cols = src_cone.dim(n)
        m = [[0] * cols for _ in range(rows)]
        hn = comp(n)
        hn1 = comp(n + 1)
        for i in range(tgt_cone.base.rank(n)):
            for ip in range(src_cone.base.rank(n)):
                coef = hn[ip][i] if hn and ip < len(hn) and i < len(hn[0]) else 0
                if coef:
                    for kk in range(a):
                        m[tgt_cone.idx_free(n, i, kk)][src_cone.idx_free(n, ip, kk)] += coef
                    for l in range(b):
                        m[tgt_cone.idx_phi1_torus(n, i, l)][src_cone.idx_phi1_torus(n, ip, l)] += coef
        for j in range(tgt_cone.base.rank(n + 1)):
            for jp in range(src_cone.base.rank(n + 1)):
                coef = hn1[jp][j] if hn1 and jp < len(hn1) and j < len(hn1[0]) else 0
                if coef:
                    for mm in range(g2):
                        m[tgt_cone.idx_phi2(n, j, mm)][src_cone.idx_phi2(n, jp, mm)] += coef
        mats[n] = m
    return ConeMap(src_cone, tgt_cone, mats)


def _cone_ses_les(labels, engines, map1: ConeMap, map2: ConeMap, section2) -> LongExactSequenceReport:
    """Verify the long exact sequence of a short exact sequence of cones.

    ``map1 : K_first -> K_mid``, ``map2 : K_mid -> K_last``; ``section2(n)``
    is an exact right inverse of map2's level matrix.  Engines must share
    the level stack.
    """
    eng1, eng2, eng3 = engines
    k_first, k_mid, k_last = eng1.cone, eng2.cone, eng3.cone
    hi = max(k_first.hi, k_mid.hi, k_last.hi) + 1
    lo = min(k_first.lo, k_mid.lo, k_last.lo) - 1
    nodes = []
    arrows = []

    def stable(engine, n):
        return engine.stable(n)

    # the section must split the surjection exactly at the matrix level
    for n in range(k_last.lo, k_last.hi + 1):
        prod = matmul(map2.matrix(n), section2(n), k_mid.dim(n), k_last.dim(n))
        ident = [[1 if i == j else 0 for j in range(k_last.dim(n))]
                 for i in range(k_last.dim(n))]
        if prod != ident:
            raise NotExact(n, "section fails to split the cone surjection")

    t_mid = eng2.levels[-1] * k_mid.resolution.denominator

    def connecting_cols(n):
        """Zig-zag: lift along section2, take the mid boundary, pull back
        through map1 modulo the torus relations."""
        src = stable(eng3, n)
        tgt = stable(eng1, n - 1)
        cols = []
        if not src.basis:
            return cols
        sec = section2(n)
        bnd = eng2.boundary(n)
        m1 = map1.matrix(n - 1)
        dim_first = k_first.dim(n - 1)
        dim_mid_prev = k_mid.dim(n - 1)
        fc_prev = k_mid.free_count(n - 1)
        for vec in src.basis:
            y = [sum(sec[i][j] * vec[j] for j in range(len(vec))) for i in range(len(sec))] \
                if sec else [0] * k_mid.dim(n)
            z = [sum(bnd[i][j] * y[j] for j in range(len(y))) for i in range(dim_mid_prev)]
            aug = []
            for rr in range(dim_mid_prev):
                row = [m1[rr][cc] for cc in range(dim_first)]
                for t in range(k_mid.torus_count(n - 1)):
                    row.append(t_mid if fc_prev + t == rr else 0)
                aug.append(row)
            sol = solve(aug, z, dim_first + k_mid.torus_count(n - 1))
            if sol is None:
                raise ArithmeticError(f"connecting homomorphism pull-back failed at degree {n}")
            w = sol[:dim_first]
            coords = tgt.class_coords(w)
            if coords is None:
                raise ArithmeticError(f"connecting image left the stable subgroup at degree {n}")
            cols.append(coords)
        return cols

    for n in range(hi, lo - 1, -1):
        s1, s2, s3 = stable(eng1, n), stable(eng2, n), stable(eng3, n)
        nodes.append((labels[0], n, s1))
        nodes.append((labels[1], n, s2))
        nodes.append((labels[2], n, s3))
        arrows.append(induced_map_on_stable(map1, eng1, eng2, n))
        arrows.append(induced_map_on_stable(map2, eng2, eng3, n))
        if n > lo:
            arrows.append(connecting_cols(n))

    stables = [nd[2] for nd in nodes]
    verdicts = []
    for i in range(1, len(nodes) - 1):
        node = stables[i]
        dim = len(node.basis)
        incoming = arrows[i - 1]
        outgoing_cols = arrows[i]
        nxt = stables[i + 1]
        ker = presented_kernel(dim, node.rel_cols, len(nxt.basis), nxt.rel_cols,
                               outgoing_cols)
        ker_gens = [list(b) for b in ker.basis]
        verdicts.append(subgroups_equal(dim, node.rel_cols, incoming, ker_gens))
    zero_flags = []
    for i, cols in enumerate(arrows):
        tgt = stables[i + 1]
        zero_flags.append(subgroups_equal(len(tgt.basis), tgt.rel_cols, list(cols), []))
    report_nodes = tuple(LESNode(lbl, deg, st.form) for lbl, deg, st in nodes)
    report_maps = tuple(tuple(tuple(c) for c in cols) for cols in arrows)
    return LongExactSequenceReport(
        nodes=report_nodes,
        maps=report_maps,
        map_is_zero=tuple(zero_flags),
        exact_at=tuple(verdicts),
        all_exact=all(verdicts),
    )


def connecting_sequence(ses: CochainSES, r: InjectiveResolution,
                        base_modulus: int | None = None,
                        labels=("quo", "mid", "sub")) -> LongExactSequenceReport:
    """Long exact homology sequence of the cones of 0->sub->mid->quo->0.

    The cone functor is contravariant, so the sequence of cones runs
    Cone(quo) -> Cone(mid) -> Cone(sub).
    """
    k_quo = ConeComplex(ses.quo, r)
    k_mid = ConeComplex(ses.mid, r)
    k_sub = ConeComplex(ses.sub, r)
    map1 = induced_cone_map(ses.surj, r)   # Cone(quo) -> Cone(mid)
    map2 = induced_cone_map(ses.inj, r)    # Cone(mid) -> Cone(sub)
    # exact section of map2 from degree-wise left inverses of the inclusion
    left_inv = {}
    for n in range(ses.sub.lo, ses.sub.hi + 1):
        fm = ses.inj.component(n)
        if fm.cols == 0:
            left_inv[n] = []
            continue
        sol = solve_matrix(
            [[fm.entries[i][j] for i in range(fm.rows)] for j in range(fm.cols)],
            [[1 if i == j else 0 for i in range(fm.cols)] for j in range(fm.cols)],
            fm.rows,
        )
        if sol is None:
            raise NotExact(n, "inclusion has no integral left inverse (cokernel not free)")
        left_inv[n] = sol  # rows: mid rank, cols: sub rank -> matrix of l^n as (sub x mid)?
    # solve gave X with fm^T X = I, i.e. X^T fm = I; l^n = X^T (sub.rank x mid.rank)
    def lcomp(n):
        x = left_inv.get(n)
        if x is None or not x:
            return [[0] * k_mid.base.rank(n) for _ in range(ses.sub.rank(n))]
        rows = len(x[0])
        return [[x[i][j] for i in range(len(x))] for j in range(rows)]

    section_map = _cone_map_from_components(k_sub, k_mid, lcomp)

    def section2(n):
        # section maps K_sub -> K_mid; matrix rows = dim of mid
        return section_map.matrices.get(n, [[0] * k_sub.dim(n) for _ in range(k_mid.dim(n))])

    base = default_base_modulus(k_sub)
    base = base * (default_base_modulus(k_mid) // gcd(base, default_base_modulus(k_mid)))
    base = base * (default_base_modulus(k_quo) // gcd(base, default_base_modulus(k_quo)))
    if base_modulus:
        base = base * (base_modulus // gcd(base, base_modulus))
    eng_q = ConeHomologyEngine(k_quo, base)
    eng_m = ConeHomologyEngine(k_mid, base)
    eng_s = ConeHomologyEngine(k_sub, base)
    return _cone_ses_les(labels, (eng_q, eng_m, eng_s), map1, map2, section2)


# ---------------------------------------------------------------------------
# coefficient sequences


@dataclass(frozen=True)
class GroupSES:
    """0 -> g -> g1 -> g2 -> 0 with explicit matrices on canonical generators."""

    g: FGAbelianGroup
    g1: FGAbelianGroup
    g2: FGAbelianGroup
    inj: IntMatrix
    surj: IntMatrix


def _validate_hom_matrix(dom: FGAbelianGroup, tgt: FGAbelianGroup, m: IntMatrix, what: str):
    err = hom_matrix_error(dom, tgt, [list(r) for r in m.entries])
    if err:
        raise NotExactCoefficients(f"{what}: {err}")


def validate_group_ses(ses: GroupSES):
    _validate_hom_matrix(ses.g, ses.g1, ses.inj, "inclusion")
    _validate_hom_matrix(ses.g1, ses.g2, ses.surj, "projection")
    n, n1, n2 = ses.g.num_generators, ses.g1.num_generators, ses.g2.num_generators
    rels = canonical_relation_cols(ses.g)
    rels1 = canonical_relation_cols(ses.g1)
    rels2 = canonical_relation_cols(ses.g2)
    inj_cols = [[ses.inj.entries[i][j] for i in range(n1)] for j in range(n)]
    surj_cols = [[ses.surj.entries[i][j] for i in range(n2)] for j in range(n1)]
    if not presented_kernel(n, rels, n1, rels1, inj_cols).form.is_trivial():
        raise NotExactCoefficients("coefficient inclusion is not injective")
    if not group_from_relations(n2, surj_cols + rels2).is_trivial():
        raise NotExactCoefficients("coefficient projection is not surjective")
    ker = presented_kernel(n1, rels1, n2, rels2, surj_cols)
    ker_gens = [list(b) for b in ker.basis]
    if not subgroups_equal(n1, rels1, inj_cols, ker_gens):
        raise NotExactCoefficients("image of the inclusion differs from the kernel of the projection")


def _solve_torus_system(coeffs: list[list[int]], rhs: list[Fraction],
                        orders: list[int]) -> list[Fraction]:
    """Solve sum_i coeffs[k][i] * y_i = rhs[k] (mod 1) with orders[i]*y_i = 0.

    Returns exact fractions in [0,1).  Existence over Q/Z is assumed (the
    caller works inside an injective module); the denominator is enlarged by
    the invariant factors of the constraint matrix so a bounded-denominator
    solution can always be found.
    """
    nunk = len(orders)
    if nunk == 0:
        if any(x % 1 != 0 for x in rhs):
            raise ArithmeticError("inconsistent empty torus system")
        return []
    t0 = 1
    for x in rhs:
        t0 = lcm(t0, x.denominator) or t0
    for o in orders:
        if o:
            t0 = lcm(t0, o)
    full = [row[:] for row in coeffs]
    for i, o in enumerate(orders):
        if o:
            full.append([o if i == j else 0 for j in range(nunk)])
    scale = 1
    for d in invariant_factors(full) if full else []:
        if d:
            scale *= d
    tsol = t0 * max(1, scale)
    target = [int(x * tsol) for x in rhs] + [0] * (len(full) - len(rhs))
    sol = solve_mod(full, target, tsol, nunk)
    if sol is None:
        raise ArithmeticError("torus congruence system unexpectedly unsolvable")
    return [Fraction(y, tsol) % 1 for y in sol]


def horseshoe_resolutions(ses: GroupSES):
    """Compatible resolutions of a short exact coefficient sequence.

    Returns (r, r1, r2, incl, proj) where incl/proj are coordinate maps
    (q_map, t_map, g2_map) embedding the resolution of g into the middle
    resolution and projecting onto the resolution of g2.  All three
    resolutions share a common denominator so the cones can be truncated at
    one torus modulus.
    """
    validate_group_ses(ses)
    g, g1, g2grp = ses.g, ses.g1, ses.g2
    r = resolve_injective(g)
    r2 = resolve_injective(g2grp)
    n, n1, n2 = g.num_generators, g1.num_generators, g2grp.num_generators
    a, b = r.q_rank, r.t_rank
    a2, b2 = r2.q_rank, r2.t_rank

    # extension u : g1 -> G' of the canonical embedding of g along the inclusion
    orders1 = g1.generator_orders()
    free1 = [i for i, o in enumerate(orders1) if o == 0]
    uq = [[Fraction(0)] * a for _ in range(n1)]
    if a and free1:
        for c in range(a):
            coeffs = [[Fraction(ses.inj.entries[i][k]) for i in free1] for k in range(n)]
            rhs = [Fraction(1) if k == c else Fraction(0) for k in range(n)]
            sol = solve_rational(coeffs, rhs)
            if sol is None:
                raise ArithmeticError("rational extension system unsolvable")
            for idx, i in enumerate(free1):
                uq[i][c] = sol[idx]
    ut = [[Fraction(0)] * b for _ in range(n1)]
    for l in range(b):
        coeffs = [[ses.inj.entries[i][k] for i in range(n1)] for k in range(n)]
        rhs = [Fraction(1, g.torsion[l]) if k == g.rank + l else Fraction(0) for k in range(n)]
        sol = _solve_torus_system(coeffs, rhs, list(orders1))
        for i in range(n1):
            ut[i][l] = sol[i]

    def u_value(vec) -> MixedModuleElement:
        q = [sum((Fraction(vec[i]) * uq[i][c] for i in range(n1)), Fraction(0)) for c in range(a)]
        t = [sum((Fraction(vec[i]) * ut[i][l] for i in range(n1)), Fraction(0)) for l in range(b)]
        return MixedModuleElement(tuple(q), tuple(t))

    # induced w : g2 -> G'' with w o surj = beta o u
    rels1 = canonical_relation_cols(g1)
    surj_cols = [[ses.surj.entries[i][j] for i in range(n2)] for j in range(n1)]
    w_vals = []
    for t_idx in range(n2):
        target = [1 if i == t_idx else 0 for i in range(n2)]
        aug_cols = surj_cols + canonical_relation_cols(g2grp)
        mat = [[col[i] for col in aug_cols] for i in range(n2)]
        sol = solve(mat, target, len(aug_cols))
        if sol is None:
            raise NotExactCoefficients("projection preimage not found")
        z = sol[:n1]
        w_vals.append(apply_beta(r, u_value(z)))

    # tau : G2' -> G'' correcting the block-diagonal beta
    g2dim = r.g2_rank
    tau_q = [[Fraction(0)] * a2 for _ in range(g2dim)]
    for k2 in range(a2):
        val = w_vals[k2]
        for m in range(g2dim):
            tau_q[m][k2] = -val.torus_block[m]
    tau_t = [[0] * b2 for _ in range(g2dim)]
    for l2 in range(b2):
        d2 = g2grp.torsion[l2]
        val = w_vals[g2grp.rank + l2]
        for m in range(g2dim):
            x = -val.torus_block[m] * d2
            if x.denominator != 1:
                raise ArithmeticError("horseshoe correction is not integral on torsion")
            tau_t[m][l2] = int(x)

    denom = 1
    for row in tau_q:
        for x in row:
            denom = lcm(denom, x.denominator)
    denom = max(1, denom)

    a1, b1 = a + a2, b + b2
    g21 = r.g2_rank + r2.g2_rank
    beta_q1 = []
    beta_t1 = []
    for m in range(r.g2_rank):
        beta_q1.append(tuple(list(r.beta_q[m]) + [tau_q[m][k2] for k2 in range(a2)]))
        beta_t1.append(tuple(list(r.beta_t[m]) + [tau_t[m][l2] for l2 in range(b2)]))
    for m2 in range(r2.g2_rank):
        beta_q1.append(tuple([Fraction(0)] * a + list(r2.beta_q[m2])))
        beta_t1.append(tuple([0] * b + list(r2.beta_t[m2])))
    r1 = InjectiveResolution(
        base=g1,
        q_rank=a1,
        t_rank=b1,
        g2_rank=g21,
        beta_q=tuple(beta_q1),
        beta_t=tuple(beta_t1),
        denominator=denom,
        canonical=False,
    )
    r_shared = replace(r, denominator=denom)
    r2_shared = replace(r2, denominator=denom)

    incl = (
        [[1 if k == kk else 0 for kk in range(a)] for k in range(a1)],
        [[1 if l == ll else 0 for ll in range(b)] for l in range(b1)],
        [[1 if m == mm else 0 for mm in range(r.g2_rank)] for m in range(g21)],
    )
    proj = (
        [[1 if kk == a + k2 else 0 for kk in range(a1)] for k2 in range(a2)],
        [[1 if ll == b + l2 else 0 for ll in range(b1)] for l2 in range(b2)],
        [[1 if mm == r.g2_rank + m2 else 0 for mm in range(g21)] for m2 in range(r2.g2_rank)],
    )
    return r_shared, r1, r2_shared, incl, proj


def _resolution_morphism_cone_map(src_cone: ConeComplex, tgt_cone: ConeComplex,
                                  maps) -> ConeMap:
    """Cone map induced by post-composition with resolution coordinate maps."""
    q_map, t_map, g2_map = maps
    mats = {}
    for n in range(src_cone.lo, src_cone.hi + 1):
        rows = tgt_cone.dim(n)
        cols = src_cone.dim(n)
        m = [[0] * cols for _ in range(rows)]
        for i in range(src_cone.base.rank(n)):
            for kt in range(tgt_cone.resolution.q_rank):
                for ks in range(src_cone.resolution.q_rank):
                    if q_map[kt][ks]:
                        m[tgt_cone.idx_free(n, i, kt)][src_cone.idx_free(n, i, ks)] += q_map[kt][ks]
            for lt in range(tgt_cone.resolution.t_rank):
                for ls in range(src_cone.resolution.t_rank):
                    if t_map[lt][ls]:
                        m[tgt_cone.idx_phi1_torus(n, i, lt)][src_cone.idx_phi1_torus(n, i, ls)] += t_map[lt][ls]
        for j in range(src_cone.base.rank(n + 1)):
            for mt in range(tgt_cone.resolution.g2_rank):
                for ms in range(src_cone.resolution.g2_rank):
                    if g2_map[mt][ms]:
                        m[tgt_cone.idx_phi2(n, j, mt)][src_cone.idx_phi2(n, j, ms)] += g2_map[mt][ms]
        mats[n] = m
    return ConeMap(src_cone, tgt_cone, mats)


def coefficient_les(c: IntegerCochainComplex, ses: GroupSES,
                    base_modulus: int | None = None) -> LongExactSequenceReport:
    """Long exact sequence in cone homology induced by 0->G->G1->G2->0."""
    r, r1, r2, incl, proj = horseshoe_resolutions(ses)
    k = ConeComplex(c, r)
    k1 = ConeComplex(c, r1)
    k2 = ConeComplex(c, r2)
    map1 = _resolution_morphism_cone_map(k, k1, incl)
    map2 = _resolution_morphism_cone_map(k1, k2, proj)
    # exact section of the projection: coordinate inclusion of the G2 blocks
    a, b, g2r = r.q_rank, r.t_rank, r.g2_rank
    a2, b2, g22 = r2.q_rank, r2.t_rank, r2.g2_rank
    sec_maps = (
        [[1 if k_ == a + kk else 0 for kk in range(a2)] for k_ in range(a + a2)],
        [[1 if l_ == b + ll else 0 for ll in range(b2)] for l_ in range(b + b2)],
        [[1 if m_ == g2r + mm else 0 for mm in range(g22)] for m_ in range(g2r + g22)],
    )
    section_cone_map = _resolution_morphism_cone_map(k2, k1, sec_maps)

    def section2(n):
        return section_cone_map.matrices.get(
            n, [[0] * k2.dim(n) for _ in range(k1.dim(n))])

    base = default_base_modulus(k)
    for kk in (k1, k2):
        d = default_base_modulus(kk)
        base = base * (d // gcd(base, d))
    base = base * (r1.denominator // gcd(base, r1.denominator))
    if base_modulus:
        base = base * (base_modulus // gcd(base, base_modulus))
    eng = ConeHomologyEngine(k, base)
    eng1 = ConeHomologyEngine(k1, base)
    eng2 = ConeHomologyEngine(k2, base)
    return _cone_ses_les((str(ses.g), str(ses.g1), str(ses.g2)),
                         (eng, eng1, eng2), map1, map2, section2)
