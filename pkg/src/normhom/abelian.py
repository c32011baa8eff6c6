"""Finitely generated abelian groups in canonical form, Hom/Ext, and
injective resolutions by divisible groups.

Groups are always reduced to ``Z^rank (+) Z/d1 (+) ... (+) Z/dk`` with
``d1 | d2 | ... | dk``, so isomorphism is field-wise equality.  Divisible
modules are never materialized: a resolution stores the block structure of
``beta : G' -> G''`` and all computation happens in bounded-denominator
submodules (see :mod:`normhom.cone`).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from .errors import SchemaError
from .intlinalg import (
    IntMatrix,
    determinant,
    invariant_factors,
    kernel_basis,
    matmul,
    smith_with_transforms,
    solve,
    solve_matrix,
)


def _normalize_factors(orders) -> tuple[int, ...]:
    """Rebuild the invariant-factor chain from arbitrary cyclic orders."""
    primary: dict[int, list[int]] = {}
    for d in orders:
        d = abs(int(d))
        if d in (0, 1):
            if d == 0:
                raise ValueError("order 0 is a free factor, not torsion")
            continue
        n = d
        p = 2
        while p * p <= n:
            if n % p == 0:
                e = 0
                while n % p == 0:
                    n //= p
                    e += 1
                primary.setdefault(p, []).append(p ** e)
            p += 1
        if n > 1:
            primary.setdefault(n, []).append(n)
    if not primary:
        return ()
    depth = max(len(v) for v in primary.values())
    for v in primary.values():
        v.sort()
    chain = []
    for k in range(depth):
        d = 1
        for v in primary.values():
            idx = len(v) - depth + k
            if idx >= 0:
                d *= v[idx]
        chain.append(d)
    return tuple(chain)


@dataclass(frozen=True)
class FGAbelianGroup:
    """Canonical form of a finitely generated abelian group."""

    rank: int = 0
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        if self.rank < 0:
            raise ValueError("rank must be non-negative")
        prev = 1
        for d in self.torsion:
            if d < 2:
                raise ValueError(f"invariant factor {d} < 2")
            if d % prev:
                raise ValueError(f"invariant factors must form a divisibility chain: {self.torsion}")
            prev = d

    @staticmethod
    def from_factors(rank: int, orders) -> "FGAbelianGroup":
        return FGAbelianGroup(rank, _normalize_factors(orders))

    @staticmethod
    def trivial() -> "FGAbelianGroup":
        return FGAbelianGroup(0, ())

    @staticmethod
    def free(rank: int) -> "FGAbelianGroup":
        return FGAbelianGroup(rank, ())

    @staticmethod
    def cyclic(d: int) -> "FGAbelianGroup":
        if d == 0:
            return FGAbelianGroup(1, ())
        return FGAbelianGroup.from_factors(0, [d])

    def direct_sum(self, other: "FGAbelianGroup") -> "FGAbelianGroup":
        return FGAbelianGroup.from_factors(self.rank + other.rank, self.torsion + other.torsion)

    @property
    def num_generators(self) -> int:
        return self.rank + len(self.torsion)

    def generator_orders(self) -> tuple[int, ...]:
        """Orders of the canonical generators; 0 stands for infinite."""
        return (0,) * self.rank + self.torsion

    def is_trivial(self) -> bool:
        return self.rank == 0 and not self.torsion

    def torsion_order(self) -> int:
        n = 1
        for d in self.torsion:
            n *= d
        return n

    def exponent(self) -> int:
        """Exponent of the torsion part (1 when torsion-free)."""
        return self.torsion[-1] if self.torsion else 1

    def order(self) -> int | None:
        return None if self.rank else self.torsion_order()

    def __str__(self):
        parts = []
        if self.rank == 1:
            parts.append("Z")
        elif self.rank > 1:
            parts.append(f"Z^{self.rank}")
        parts.extend(f"Z/{d}" for d in self.torsion)
        return " (+) ".join(parts) if parts else "0"

    @staticmethod
    def parse(text: str) -> "FGAbelianGroup":
        """Parse the descriptor mini-language: ``Z``, ``Z/6``, ``Z^2+Z/2``, ``0``."""
        s = text.replace("(+)", "+").replace(" ", "")
        if s in ("0", ""):
            return FGAbelianGroup.trivial()
        rank = 0
        orders = []
        for term in s.split("+"):
            m = re.fullmatch(r"Z(?:\^(\d+))?", term)
            if m:
                rank += int(m.group(1)) if m.group(1) else 1
                continue
            m = re.fullmatch(r"Z/(\d+)(?:\^(\d+))?", term)
            if m:
                d = int(m.group(1))
                k = int(m.group(2)) if m.group(2) else 1
                if d < 2:
                    raise SchemaError(f"bad torsion order in group descriptor: {term}")
                orders.extend([d] * k)
                continue
            raise SchemaError(f"cannot parse group descriptor term: {term!r}")
        return FGAbelianGroup.from_factors(rank, orders)


@dataclass(frozen=True)
class SmithDecomposition:
    """U * A * V = S with U, V unimodular and S diagonal (d1 | d2 | ...)."""

    U: IntMatrix
    S: IntMatrix
    V: IntMatrix


def smith_normal_form(a: IntMatrix) -> SmithDecomposition:
    u, _, s, v, _ = smith_with_transforms(a.tolists())
    return SmithDecomposition(
        U=IntMatrix.from_rows(u, a.rows),
        S=IntMatrix.from_rows(s, a.cols),
        V=IntMatrix.from_rows(v, a.cols),
    )


def cokernel(a: IntMatrix) -> FGAbelianGroup:
    """Canonical form of Z^rows / colspan(a)."""
    facs = invariant_factors(a.tolists())
    return FGAbelianGroup.from_factors(a.rows - len(facs), [d for d in facs if d > 1])


def hom(a: FGAbelianGroup, b: FGAbelianGroup) -> FGAbelianGroup:
    """Hom(a, b) via Hom(Z,B)=B, Hom(Z/d,Z)=0, Hom(Z/d,Z/e)=Z/gcd(d,e)."""
    orders = []
    for _ in range(a.rank):
        orders.extend(b.torsion)
    for d in a.torsion:
        for e in b.torsion:
            orders.append(gcd(d, e))
    return FGAbelianGroup.from_factors(a.rank * b.rank, [o for o in orders if o > 1])


def ext(a: FGAbelianGroup, b: FGAbelianGroup) -> FGAbelianGroup:
    """Ext(a, b) via Ext(Z,B)=0, Ext(Z/d,Z)=Z/d, Ext(Z/d,Z/e)=Z/gcd(d,e)."""
    orders = []
    for d in a.torsion:
        orders.extend([d] * b.rank)
        for e in b.torsion:
            orders.append(gcd(d, e))
    return FGAbelianGroup.from_factors(0, [o for o in orders if o > 1])


def is_isomorphic(a: FGAbelianGroup, b: FGAbelianGroup) -> bool:
    return a == b


# ---------------------------------------------------------------------------
# Injective resolutions 0 -> G -> G' -> G'' -> 0 by divisible groups.


@dataclass(frozen=True)
class InjectiveResolution:
    """Structured divisible resolution of a finitely generated group.

    ``G' = Q^q_rank (+) (Q/Z)^t_rank`` and ``G'' = (Q/Z)^g2_rank``; ``beta``
    is stored blockwise: a rational matrix on the Q part (denominators divide
    ``denominator``) and an integer matrix on the torus part.  For the
    canonical resolution each Z summand of G contributes Q -> Q/Z (reduction
    mod 1) and each Z/d summand contributes Q/Z -> Q/Z (multiplication by d).
    """

    base: FGAbelianGroup
    q_rank: int
    t_rank: int
    g2_rank: int
    beta_q: tuple[tuple[Fraction, ...], ...]
    beta_t: tuple[tuple[int, ...], ...]
    denominator: int = 1
    canonical: bool = True
    # canonical embedding data: generator i of G maps to coordinate embed[i]
    # of G' (a Q coordinate for free generators, a torus coordinate with
    # value 1/d for torsion generators).
    embed_q: tuple[int, ...] = ()
    embed_t: tuple[int, ...] = ()

    def __post_init__(self):
        if len(self.beta_q) != self.g2_rank or len(self.beta_t) != self.g2_rank:
            raise ValueError("beta blocks must have g2_rank rows")
        for row in self.beta_q:
            if len(row) != self.q_rank:
                raise ValueError("beta_q has wrong width")
            for x in row:
                if (x * self.denominator).denominator != 1:
                    raise ValueError("beta_q denominators must divide the stored denominator")
        for row in self.beta_t:
            if len(row) != self.t_rank:
                raise ValueError("beta_t has wrong width")


def resolve_injective(g: FGAbelianGroup) -> InjectiveResolution:
    """The canonical divisible resolution of ``g``."""
    r, tors = g.rank, g.torsion
    t = len(tors)
    g2 = r + t
    beta_q = tuple(
        tuple(Fraction(1) if (i == k and i < r) else Fraction(0) for k in range(r))
        for i in range(g2)
    )
    beta_t = tuple(
        tuple(tors[i - r] if (i >= r and i - r == l) else 0 for l in range(t))
        for i in range(g2)
    )
    return InjectiveResolution(
        base=g,
        q_rank=r,
        t_rank=t,
        g2_rank=g2,
        beta_q=beta_q,
        beta_t=beta_t,
        denominator=1,
        canonical=True,
        embed_q=tuple(range(r)),
        embed_t=tuple(range(t)),
    )


def permuted_resolution(g: FGAbelianGroup) -> InjectiveResolution:
    """A resolution isomorphic to the canonical one with summands reversed.

    Used to spot-check that homology does not depend on the resolution
    presentation.
    """
    r, tors = g.rank, g.torsion
    t = len(tors)
    g2 = r + t
    # reverse the order of the G'' coordinates and of the torus coordinates
    qperm = tuple(reversed(range(r)))
    tperm = tuple(reversed(range(t)))
    g2perm = tuple(reversed(range(g2)))
    canon = resolve_injective(g)
    beta_q = tuple(tuple(canon.beta_q[g2perm[i]][qperm[k]] for k in range(r)) for i in range(g2))
    beta_t = tuple(tuple(canon.beta_t[g2perm[i]][tperm[l]] for l in range(t)) for i in range(g2))
    return InjectiveResolution(
        base=g,
        q_rank=r,
        t_rank=t,
        g2_rank=g2,
        beta_q=beta_q,
        beta_t=beta_t,
        denominator=1,
        canonical=False,
        embed_q=qperm,
        embed_t=tperm,
    )


@dataclass(frozen=True)
class MixedModuleElement:
    """Element of Q^a (+) (Q/Z)^b with exact rational coordinates."""

    rational_block: tuple[Fraction, ...]
    torus_block: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(
            self, "torus_block", tuple(Fraction(x) % 1 for x in self.torus_block)
        )
        object.__setattr__(
            self, "rational_block", tuple(Fraction(x) for x in self.rational_block)
        )

    @staticmethod
    def zero(a: int, b: int) -> "MixedModuleElement":
        return MixedModuleElement((Fraction(0),) * a, (Fraction(0),) * b)

    def __add__(self, other: "MixedModuleElement") -> "MixedModuleElement":
        return MixedModuleElement(
            tuple(x + y for x, y in zip(self.rational_block, other.rational_block)),
            tuple(x + y for x, y in zip(self.torus_block, other.torus_block)),
        )

    def scale(self, c) -> "MixedModuleElement":
        return MixedModuleElement(
            tuple(c * x for x in self.rational_block),
            tuple(c * x for x in self.torus_block),
        )

    def is_zero(self) -> bool:
        return all(x == 0 for x in self.rational_block) and all(x == 0 for x in self.torus_block)


def apply_beta(res: InjectiveResolution, x: MixedModuleElement) -> MixedModuleElement:
    """Evaluate beta : G' -> G'' on an exact element."""
    if len(x.rational_block) != res.q_rank or len(x.torus_block) != res.t_rank:
        raise ValueError("element shape does not match the resolution")
    out = []
    for i in range(res.g2_rank):
        v = sum((res.beta_q[i][k] * x.rational_block[k] for k in range(res.q_rank)), Fraction(0))
        v += sum((res.beta_t[i][l] * x.torus_block[l] for l in range(res.t_rank)), Fraction(0))
        out.append(v)
    return MixedModuleElement((), tuple(out))


def hom_matrix_error(dom: FGAbelianGroup, tgt: FGAbelianGroup, entries) -> str | None:
    """Why ``entries`` fails to define a homomorphism on canonical
    generators, or None if it is valid."""
    if len(entries) != tgt.num_generators:
        return "matrix has wrong number of rows"
    if any(len(row) != dom.num_generators for row in entries):
        return "matrix has wrong number of columns"
    orders_dom = dom.generator_orders()
    orders_tgt = tgt.generator_orders()
    for j, o in enumerate(orders_dom):
        if o == 0:
            continue
        for i, ot in enumerate(orders_tgt):
            v = o * entries[i][j]
            if ot == 0:
                if v != 0:
                    return f"column {j} does not respect the generator order"
            elif v % ot:
                return f"column {j} does not respect the generator order"
    return None


def canonical_relation_cols(g: FGAbelianGroup) -> list[list[int]]:
    """Relation columns (d_j on the j-th torsion generator) of the canonical
    presentation of ``g``."""
    n = g.num_generators
    cols = []
    for j, d in enumerate(g.torsion):
        col = [0] * n
        col[g.rank + j] = d
        cols.append(col)
    return cols


# ---------------------------------------------------------------------------
# Presented groups Z^n / colspan(relations) and their subquotients.  These
# are the workhorse for every homology and exactness computation.


@dataclass(frozen=True)
class SubgroupInfo:
    """A subgroup of a presented group with an explicit generating basis.

    ``basis`` columns are ambient vectors spanning (gens + relations);
    ``rel_coords`` expresses the ambient relations in that basis, so the
    subgroup is presented as Z^len(basis) / colspan(rel_coords).
    """

    form: FGAbelianGroup
    basis: tuple[tuple[int, ...], ...]
    rel_coords: tuple[tuple[int, ...], ...]  # len(basis) x num_relations, column-major rows


def _cols_to_matrix(cols: list[list[int]], dim: int) -> list[list[int]]:
    return [[col[i] for col in cols] for i in range(dim)]


def group_from_relations(dim: int, rel_cols: list[list[int]]) -> FGAbelianGroup:
    if dim == 0:
        return FGAbelianGroup.trivial()
    facs = invariant_factors(_cols_to_matrix(rel_cols, dim)) if rel_cols else []
    return FGAbelianGroup.from_factors(dim - len(facs), [d for d in facs if d > 1])


def subgroup_form(dim: int, rel_cols: list[list[int]], gen_cols: list[list[int]]) -> SubgroupInfo:
    """Canonical form of the subgroup generated by ``gen_cols`` inside
    Z^dim / colspan(rel_cols)."""
    span = list(gen_cols) + list(rel_cols)
    if dim == 0 or not span:
        return SubgroupInfo(FGAbelianGroup.trivial(), (), ())
    a = _cols_to_matrix(span, dim)
    u, uinv, s, _, _ = smith_with_transforms(a)
    width = len(span)
    r = sum(1 for i in range(min(dim, width)) if s[i][i])
    basis = [[uinv[row][i] * s[i][i] for row in range(dim)] for i in range(r)]
    # coordinates of the ambient relations in that basis
    rel_coord_cols = []
    for col in rel_cols:
        c = [sum(u[i][j] * col[j] for j in range(dim)) for i in range(dim)]
        coords = []
        for i in range(dim):
            if i < r:
                d = s[i][i]
                if c[i] % d:
                    raise ArithmeticError("relation does not lie in the generated lattice")
                coords.append(c[i] // d)
            elif c[i]:
                raise ArithmeticError("relation does not lie in the generated lattice")
        rel_coord_cols.append(coords)
    form = group_from_relations(r, rel_coord_cols)
    return SubgroupInfo(
        form=form,
        basis=tuple(tuple(b) for b in basis),
        rel_coords=tuple(tuple(row) for row in _cols_to_matrix(rel_coord_cols, r)),
    )


def lattice_contains(dim: int, span_cols: list[list[int]], vec: list[int]) -> bool:
    if all(x == 0 for x in vec):
        return True
    if not span_cols:
        return False
    return solve(_cols_to_matrix(span_cols, dim), list(vec)) is not None


def express_in_lattice(dim: int, span_cols: list[list[int]], vecs: list[list[int]]) -> list[list[int]] | None:
    """Integer coordinates of ``vecs`` in the spanning set, or None."""
    if not span_cols:
        return None if any(any(v) for v in vecs) else [[] for _ in vecs]
    sol = solve_matrix(_cols_to_matrix(span_cols, dim), _cols_to_matrix(vecs, dim))
    if sol is None:
        return None
    return [[sol[i][j] for i in range(len(span_cols))] for j in range(len(vecs))]


def subgroup_leq(dim: int, rel_cols: list[list[int]], gens_a: list[list[int]], gens_b: list[list[int]]) -> bool:
    """Is <gens_a> contained in <gens_b> modulo the relations?"""
    span = list(gens_b) + list(rel_cols)
    return all(lattice_contains(dim, span, g) for g in gens_a)


def subgroups_equal(dim: int, rel_cols: list[list[int]], gens_a: list[list[int]], gens_b: list[list[int]]) -> bool:
    return subgroup_leq(dim, rel_cols, gens_a, gens_b) and subgroup_leq(dim, rel_cols, gens_b, gens_a)


def canonicalize_presented_endo(dim: int, rel_cols: list[list[int]], endo: list[list[int]]):
    """Canonical form of Z^dim / colspan(rel_cols) together with the matrix
    of the induced endomorphism on canonical generators (free generators
    first, then the invariant-factor chain)."""
    if dim == 0:
        return FGAbelianGroup.trivial(), []
    rel = _cols_to_matrix(rel_cols, dim) if rel_cols else [[0] * 0 for _ in range(dim)]
    u, uinv, s, _, _ = smith_with_transforms(rel)
    width = len(rel_cols)
    orders = []
    for i in range(dim):
        d = s[i][i] if i < min(dim, width) else 0
        orders.append(d)
    kept = [i for i in range(dim) if orders[i] == 0] + \
           [i for i in range(dim) if orders[i] > 1]
    kept_orders = [orders[i] for i in kept]
    group = FGAbelianGroup.from_factors(
        sum(1 for o in kept_orders if o == 0), [o for o in kept_orders if o > 1])
    # transformed endomorphism u * endo * uinv restricted to kept coords
    big = matmul(matmul(u, endo, dim), uinv, dim)
    mat = []
    for r_i in kept:
        row = []
        for c_j in kept:
            v = big[r_i][c_j]
            if orders[r_i] > 1:
                v %= orders[r_i]
            row.append(v)
        mat.append(row)
    err = hom_matrix_error(group, group, mat)
    if err:
        raise ArithmeticError(f"endomorphism does not descend to the quotient: {err}")
    return group, mat


def presented_kernel(
    dim_dom: int,
    rels_dom: list[list[int]],
    dim_tgt: int,
    rels_tgt: list[list[int]],
    map_cols: list[list[int]],
) -> SubgroupInfo:
    """Kernel of the induced map between presented groups, as a subgroup of
    the domain.  ``map_cols[j]`` is the image (ambient target vector) of the
    j-th domain generator."""
    if dim_dom == 0:
        return SubgroupInfo(FGAbelianGroup.trivial(), (), ())
    if dim_tgt == 0:
        gens = [[1 if i == j else 0 for i in range(dim_dom)] for j in range(dim_dom)]
        return subgroup_form(dim_dom, rels_dom, gens)
    aug_cols = [list(c) for c in map_cols] + [list(c) for c in rels_tgt]
    ker = kernel_basis(_cols_to_matrix(aug_cols, dim_tgt), len(aug_cols))
    gens = [k[:dim_dom] for k in ker]
    return subgroup_form(dim_dom, rels_dom, gens)
