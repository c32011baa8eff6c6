"""Finite covered spaces: Vietoris complexes, nerves, relative cochain
complexes, refinement maps, and Dowker comparison.

Points are arbitrary hashable labels; internally simplices are tuples of
point indices in the order the space lists its points, which makes every
matrix deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, combinations_with_replacement, permutations

from .abelian import FGAbelianGroup
from .complexes import (
    CochainMap,
    CohomologyData,
    IntegerCochainComplex,
    cohomology_all,
)
from .errors import NotARefinement, SchemaError, UnknownCovering
from .intlinalg import IntMatrix, invariant_factors


@dataclass(frozen=True)
class FiniteCoveredSpace:
    """Finite point set with a closed subspace and named indexed coverings."""

    points: tuple
    closed: tuple = ()
    coverings: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(set(self.points)) != len(self.points):
            raise SchemaError("duplicate points")
        pset = set(self.points)
        for p in self.closed:
            if p not in pset:
                raise SchemaError(f"closed subspace point {p!r} not in the space")
        for name, members in self.coverings.items():
            union = set()
            for mem in members:
                for p in mem:
                    if p not in pset:
                        raise SchemaError(f"covering {name!r} uses unknown point {p!r}")
                union.update(mem)
            if union != pset:
                raise SchemaError(f"covering {name!r} does not cover the space")

    def covering(self, name: str):
        if name not in self.coverings:
            raise UnknownCovering(f"no covering named {name!r}")
        return [tuple(m) for m in self.coverings[name]]

    def point_index(self, p) -> int:
        return self.points.index(p)


@dataclass(frozen=True)
class CoveringPair:
    """(alpha, beta) with beta a covering of the closed subspace refining
    alpha's restriction; the witness maps beta members into alpha members."""

    alpha: str
    beta: tuple            # tuple of tuples of points of the closed subspace
    witness: tuple         # witness[j] = index of an alpha member containing beta[j] (intersected with A)

    def validate(self, space: FiniteCoveredSpace):
        members = space.covering(self.alpha)
        aset = set(space.closed)
        union = set()
        for j, vb in enumerate(self.beta):
            for p in vb:
                if p not in aset:
                    raise SchemaError(f"beta member {j} leaves the closed subspace")
            union.update(vb)
            if j >= len(self.witness):
                raise NotARefinement(f"missing witness for beta member {j}")
            w = self.witness[j]
            if not (0 <= w < len(members)):
                raise NotARefinement(f"witness {w} out of range")
            ua = set(members[w]) & aset
            if not set(vb) <= ua:
                raise NotARefinement(f"beta member {j} not inside alpha member {w} on the subspace")
        if union != aset:
            raise SchemaError("beta does not cover the closed subspace")


@dataclass(frozen=True)
class SimplicialComplexRep:
    """Abstract simplicial complex stored by maximal simplices."""

    vertices: tuple
    facets: tuple  # tuples of vertices, each sorted by vertex position

    def all_simplices(self) -> list[tuple]:
        seen = set()
        order = {v: i for i, v in enumerate(self.vertices)}
        for f in self.facets:
            fs = tuple(sorted(f, key=lambda v: order[v]))
            for r in range(1, len(fs) + 1):
                for sub in combinations(fs, r):
                    seen.add(sub)
        return sorted(seen, key=lambda s: (len(s), tuple(order[v] for v in s)))

    def simplices_by_dim(self) -> dict[int, list[tuple]]:
        out: dict[int, list[tuple]] = {}
        for s in self.all_simplices():
            out.setdefault(len(s) - 1, []).append(s)
        return out


def _maximal(sets: list[frozenset]) -> list[frozenset]:
    out = []
    for s in sets:
        if not any(s < t for t in sets):
            if s not in out:
                out.append(s)
    return out


def vietoris_complex(space: FiniteCoveredSpace, alpha: str) -> SimplicialComplexRep:
    """Simplices are the nonempty subsets contained in one covering member,
    so the facets are just the inclusion-maximal members."""
    members = [frozenset(m) for m in space.covering(alpha)]
    order = {p: i for i, p in enumerate(space.points)}
    facets = _maximal([m for m in members if m])
    return SimplicialComplexRep(
        vertices=tuple(space.points),
        facets=tuple(sorted((tuple(sorted(f, key=lambda v: order[v])) for f in facets),
                            key=lambda s: (len(s), tuple(order[v] for v in s)))),
    )


def nerve(members) -> SimplicialComplexRep:
    """Nerve of an indexed family: vertices are member indices, simplices
    the subfamilies with nonempty common intersection."""
    sets = [frozenset(m) for m in members]
    m = len(sets)
    facets = []
    # a subfamily has common intersection iff some point's membership
    # pattern contains it; collect the maximal patterns
    patterns = set()
    allpoints = set()
    for s in sets:
        allpoints |= s
    for p in allpoints:
        pat = frozenset(i for i, s in enumerate(sets) if p in s)
        if pat:
            patterns.add(pat)
    facets = _maximal(sorted(patterns, key=lambda s: (len(s), sorted(s))))
    verts = tuple(range(m))
    return SimplicialComplexRep(
        vertices=verts,
        facets=tuple(sorted((tuple(sorted(f)) for f in facets), key=lambda s: (len(s), s))),
    )


def _coboundary_matrices(simplices_by_dim: dict[int, list[tuple]], top: int):
    """Ranks and coboundary matrices for degrees 0..top."""
    ranks = [len(simplices_by_dim.get(d, [])) for d in range(top + 1)]
    deltas = []
    for d in range(top):
        rows = simplices_by_dim.get(d + 1, [])
        cols = simplices_by_dim.get(d, [])
        index = {s: j for j, s in enumerate(cols)}
        mat = [[0] * len(cols) for _ in rows]
        for i, tau in enumerate(rows):
            for pos in range(len(tau)):
                face = tau[:pos] + tau[pos + 1:]
                j = index.get(face)
                if j is not None:
                    mat[i][j] += -1 if pos % 2 else 1
        deltas.append(IntMatrix.from_rows(mat, len(cols)))
    return ranks, deltas


def simplicial_cochain_complex(k: SimplicialComplexRep, max_degree: int | None = None) -> IntegerCochainComplex:
    """Integer simplicial cochain complex of ``k`` (alternating model)."""
    by_dim = k.simplices_by_dim()
    top = max(by_dim) if by_dim else 0
    if max_degree is not None:
        top = min(top, max_degree)
    ranks, deltas = _coboundary_matrices(by_dim, top)
    return IntegerCochainComplex(0, tuple(ranks), tuple(deltas))


def subcomplex_relative_complex(kx: SimplicialComplexRep, ka: SimplicialComplexRep) -> IntegerCochainComplex:
    """Kernel complex of the restriction C^*(kx) -> C^*(ka)."""
    xs = kx.all_simplices()
    asimp = set(ka.all_simplices())
    for s in asimp:
        if s not in set(xs):
            raise NotARefinement("subspace complex is not a subcomplex")
    keep = [s for s in xs if s not in asimp]
    by_dim: dict[int, list[tuple]] = {}
    for s in keep:
        by_dim.setdefault(len(s) - 1, []).append(s)
    top = max(by_dim) if by_dim else 0
    ranks = [len(by_dim.get(d, [])) for d in range(top + 1)]
    deltas = []
    for d in range(top):
        rows = by_dim.get(d + 1, [])
        cols = by_dim.get(d, [])
        index = {s: j for j, s in enumerate(cols)}
        mat = [[0] * len(cols) for _ in rows]
        for i, tau in enumerate(rows):
            for pos in range(len(tau)):
                face = tau[:pos] + tau[pos + 1:]
                j = index.get(face)
                if j is not None:
                    mat[i][j] += -1 if pos % 2 else 1
        deltas.append(IntMatrix.from_rows(mat, len(cols)))
    if not keep:
        return IntegerCochainComplex(0, (0,), ())
    return IntegerCochainComplex(0, tuple(ranks), tuple(deltas))


def beta_vietoris_complex(space: FiniteCoveredSpace, p: CoveringPair) -> SimplicialComplexRep:
    """Vietoris complex of the closed subspace with respect to beta."""
    p.validate(space)
    order = {pt: i for i, pt in enumerate(space.points)}
    facets = _maximal([frozenset(m) for m in p.beta if m])
    return SimplicialComplexRep(
        vertices=tuple(pt for pt in space.points if pt in set(space.closed)),
        facets=tuple(sorted((tuple(sorted(f, key=lambda v: order[v])) for f in facets),
                            key=lambda s: (len(s), tuple(order[v] for v in s)))),
    )


def relative_cochain_complex(space: FiniteCoveredSpace, p: CoveringPair) -> IntegerCochainComplex:
    """C^*(alpha, beta): cochains on X(alpha) vanishing on A(beta)."""
    kx = vietoris_complex(space, p.alpha)
    if not space.closed or not p.beta:
        if space.closed and not p.beta:
            raise SchemaError("nonempty closed subspace needs a beta covering")
        return simplicial_cochain_complex(kx)
    ka = beta_vietoris_complex(space, p)
    return subcomplex_relative_complex(kx, ka)


def extend_by_zero(space: FiniteCoveredSpace, alpha: str, phi: dict, n: int) -> dict:
    """Total function on (n+1)-tuples equal to phi on tuples inside a
    covering member (lowest member index wins) and zero elsewhere."""
    members = [frozenset(m) for m in space.covering(alpha)]
    out = {}

    def tuples(depth, prefix):
        if depth == 0:
            yield prefix
            return
        for pt in space.points:
            yield from tuples(depth - 1, prefix + (pt,))

    for t in tuples(n + 1, ()):
        val = 0
        for mem in members:
            if set(t) <= mem:
                val = phi.get(t, 0)
                break
        out[t] = val
    return out


def restrict_to_cover(space: FiniteCoveredSpace, alpha: str, total: dict, n: int) -> dict:
    """Restriction of a total tuple-cochain to tuples inside the covering."""
    members = [frozenset(m) for m in space.covering(alpha)]
    out = {}
    for t, v in total.items():
        if len(t) == n + 1 and any(set(t) <= mem for mem in members):
            out[t] = v
    return out


def is_refinement(space: FiniteCoveredSpace, fine: str, coarse: str) -> bool:
    fine_m = [frozenset(m) for m in space.covering(fine)]
    coarse_m = [frozenset(m) for m in space.covering(coarse)]
    return all(any(f <= c for c in coarse_m) for f in fine_m)


def refinement_cochain_map(space: FiniteCoveredSpace, fine: str, coarse: str) -> CochainMap:
    """Restriction map C^*(X(coarse)) -> C^*(X(fine)); X(fine) is a
    subcomplex of X(coarse) because every fine member sits in a coarse one."""
    if not is_refinement(space, fine, coarse):
        raise NotARefinement(f"{fine!r} does not refine {coarse!r}")
    kc = vietoris_complex(space, coarse)
    kf = vietoris_complex(space, fine)
    cc = simplicial_cochain_complex(kc)
    cf = simplicial_cochain_complex(kf)
    coarse_simp = kc.simplices_by_dim()
    fine_simp = kf.simplices_by_dim()
    comps = {}
    for d in range(0, max(cc.hi, cf.hi) + 1):
        rows = fine_simp.get(d, [])
        cols = coarse_simp.get(d, [])
        index = {s: j for j, s in enumerate(cols)}
        mat = [[0] * len(cols) for _ in rows]
        for i, s in enumerate(rows):
            j = index.get(s)
            if j is None:
                raise NotARefinement("fine simplex missing from the coarse complex")
            mat[i][j] = 1
        comps[d] = IntMatrix.from_rows(mat, len(cols))
    return CochainMap(cc, cf, comps)


def colimit_cohomology(space: FiniteCoveredSpace, chain: list[str], n: int) -> FGAbelianGroup:
    """Colimit of H^n along a refinement chain (coarse to fine), computed by
    presenting the coequalizer of the finite diagram."""
    if not chain:
        raise SchemaError("empty refinement chain")
    datas = []
    maps = []
    for i, name in enumerate(chain):
        kx = vietoris_complex(space, name)
        datas.append(CohomologyData(simplicial_cochain_complex(kx), n))
        if i:
            maps.append(refinement_cochain_map(space, chain[i], chain[i - 1]))
    # presentation: generators of every stage, relations: stage torsion and
    # x - (image of x in next stage)
    offsets = []
    total = 0
    for d in datas:
        offsets.append(total)
        total += len(d.generators)
    rel_cols = []
    for i, d in enumerate(datas):
        for j, (_, order) in enumerate(d.generators):
            if order > 1:
                col = [0] * total
                col[offsets[i] + j] = order
                rel_cols.append(col)
    for i, m in enumerate(maps):
        src = datas[i]
        tgt = datas[i + 1]
        comp = m.component(n)
        for j, (vec, _) in enumerate(src.generators):
            img = comp.apply(list(vec))
            coords = tgt.class_coords(img)
            col = [0] * total
            col[offsets[i] + j] = 1
            for jj, c in enumerate(coords):
                col[offsets[i + 1] + jj] -= c
            rel_cols.append(col)
    from .abelian import group_from_relations

    return group_from_relations(total, rel_cols)


def pair_cochain_ses(space: FiniteCoveredSpace, p: CoveringPair):
    """The short exact sequence 0 -> C(alpha,beta) -> C(X(alpha)) -> C(A(beta)) -> 0
    with explicit basis inclusion and restriction matrices."""
    from .les import CochainSES

    kx = vietoris_complex(space, p.alpha)
    ka = beta_vietoris_complex(space, p)
    cx = simplicial_cochain_complex(kx)
    ca = simplicial_cochain_complex(ka) if ka.facets else IntegerCochainComplex(0, (0,), ())
    sub = subcomplex_relative_complex(kx, ka) if ka.facets else cx
    x_by_dim = kx.simplices_by_dim()
    a_simplices = set(ka.all_simplices()) if ka.facets else set()
    a_by_dim = ka.simplices_by_dim() if ka.facets else {}
    inj_comps = {}
    surj_comps = {}
    for d in range(0, cx.hi + 1):
        xs = x_by_dim.get(d, [])
        x_index = {s: j for j, s in enumerate(xs)}
        kept = [s for s in xs if s not in a_simplices]
        mat = [[0] * len(kept) for _ in xs]
        for j, s in enumerate(kept):
            mat[x_index[s]][j] = 1
        inj_comps[d] = IntMatrix.from_rows(mat, len(kept))
        asd = a_by_dim.get(d, [])
        rmat = [[0] * len(xs) for _ in asd]
        for i, s in enumerate(asd):
            rmat[i][x_index[s]] = 1
        surj_comps[d] = IntMatrix.from_rows(rmat, len(xs))
    inj = CochainMap(sub, cx, inj_comps)
    surj = CochainMap(cx, ca, surj_comps)
    return CochainSES(sub=sub, mid=cx, quo=ca, inj=inj, surj=surj)


def dowker_check(space: FiniteCoveredSpace, alpha: str, n: int) -> bool:
    """H^n of the Vietoris complex against H^n of the nerve."""
    members = space.covering(alpha)
    kv = vietoris_complex(space, alpha)
    kn = nerve(members)
    cv = simplicial_cochain_complex(kv, max_degree=n + 1)
    cn = simplicial_cochain_complex(kn, max_degree=n + 1)
    hv = cohomology_all(cv).get(n, FGAbelianGroup.trivial())
    hn = cohomology_all(cn).get(n, FGAbelianGroup.trivial())
    return hv == hn


# ---------------------------------------------------------------------------
# exhaustive Dowker sweep over small covers, up to relabeling


def _subsets_of_mask(mask: int):
    sub = mask
    while sub:
        yield sub
        sub = (sub - 1) & mask


def _forms_from_facet_masks(facet_masks, max_degree: int):
    """Cohomology forms in degrees 0..max_degree of the complex whose
    maximal simplices are given as vertex bitmasks."""
    seen = set()
    for f in facet_masks:
        for sub in _subsets_of_mask(f):
            seen.add(sub)
    by_dim: dict[int, list[int]] = {}
    for s in seen:
        d = bin(s).count("1") - 1
        if d <= max_degree + 1:
            by_dim.setdefault(d, []).append(s)
    for d in by_dim:
        by_dim[d].sort()
    top = min(max(by_dim, default=0), max_degree + 1)
    ranks = [len(by_dim.get(d, [])) for d in range(top + 1)]
    deltas = []
    for d in range(top):
        rows = by_dim.get(d + 1, [])
        cols = by_dim.get(d, [])
        index = {s: j for j, s in enumerate(cols)}
        mat = [[0] * len(cols) for _ in rows]
        for i, tau in enumerate(rows):
            verts = [b for b in range(tau.bit_length()) if tau >> b & 1]
            for pos, b in enumerate(verts):
                face = tau & ~(1 << b)
                j = index.get(face)
                if j is not None:
                    mat[i][j] += -1 if pos % 2 else 1
        deltas.append(mat)
    facs = [invariant_factors(m) if m else [] for m in deltas]
    forms = []
    for nn in range(max_degree + 1):
        if nn > top:
            forms.append(FGAbelianGroup.trivial())
            continue
        rk_out = len(facs[nn]) if nn < top else 0
        prev = facs[nn - 1] if nn >= 1 and nn - 1 < top else []
        free = ranks[nn] - rk_out - len(prev)
        forms.append(FGAbelianGroup.from_factors(free, [x for x in prev if x > 1]))
    return tuple(forms)


def dowker_sweep(max_points: int = 6, max_members: int = 4, max_degree: int = 2):
    """Exhaustively compare Vietoris and nerve cohomology for every cover
    with at most ``max_members`` distinct members of every space with at
    most ``max_points`` points, up to relabeling of points and members.

    A cover is determined up to isomorphism by the multiset of membership
    patterns of its points, so one representative per pattern class is an
    exhaustive sweep (cohomology is an isomorphism invariant).  Returns
    (number of classes checked, list of failing class descriptions).
    """
    failures = []
    checked = 0
    for m in range(1, max_members + 1):
        patterns = list(range(1, 1 << m))
        perms = list(permutations(range(m)))
        seen = set()
        full = (1 << m) - 1
        for total in range(1, max_points + 1):
            for combo in combinations_with_replacement(patterns, total):
                union = 0
                for pat in combo:
                    union |= pat
                if union != full:
                    continue  # some member empty
                # members must be pairwise distinct point sets
                distinct = True
                for i in range(m):
                    for j in range(i + 1, m):
                        if not any(((pat >> i) & 1) != ((pat >> j) & 1) for pat in combo):
                            distinct = False
                            break
                    if not distinct:
                        break
                if not distinct:
                    continue
                best = None
                for perm in perms:
                    mapped = tuple(sorted(
                        sum(((pat >> i) & 1) << perm[i] for i in range(m))
                        for pat in combo
                    ))
                    if best is None or mapped < best:
                        best = mapped
                if best in seen:
                    continue
                seen.add(best)
                checked += 1
                # representative: point p has pattern combo[p]
                member_masks = []
                for i in range(m):
                    mask = 0
                    for p, pat in enumerate(combo):
                        if (pat >> i) & 1:
                            mask |= 1 << p
                    member_masks.append(mask)
                viet = _forms_from_facet_masks(member_masks, max_degree)
                nerv = _forms_from_facet_masks(list(combo), max_degree)
                if viet != nerv:
                    failures.append((m, combo, viet, nerv))
    return checked, failures
