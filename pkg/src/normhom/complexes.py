"""Bounded cochain complexes of finitely generated free abelian groups.

Degrees run over a contiguous window; outside it every group is zero.  All
cohomology is computed by exact Smith-form arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .abelian import FGAbelianGroup
from .errors import DegreeMismatch, DegreeOutOfRange, NotAComplex, NotAHomotopy
from .intlinalg import (
    IntMatrix,
    invariant_factors,
    kernel_basis,
    matmul,
    smith_with_transforms,
    solve,
    solve_matrix,
)


@dataclass(frozen=True)
class IntegerCochainComplex:
    """Graded free abelian groups C^lo..C^hi with coboundaries delta^n."""

    lo: int
    ranks: tuple[int, ...]
    deltas: tuple[IntMatrix, ...]

    def __post_init__(self):
        if not self.ranks:
            raise DegreeMismatch("a complex needs at least one degree")
        if any(r < 0 for r in self.ranks):
            raise DegreeMismatch("negative rank")
        if len(self.deltas) != len(self.ranks) - 1:
            raise DegreeMismatch(
                f"expected {len(self.ranks) - 1} coboundaries, got {len(self.deltas)}"
            )
        for i, d in enumerate(self.deltas):
            if d.rows != self.ranks[i + 1] or d.cols != self.ranks[i]:
                raise DegreeMismatch(
                    f"delta at degree {self.lo + i} has shape {d.rows}x{d.cols}, "
                    f"expected {self.ranks[i + 1]}x{self.ranks[i]}"
                )

    @property
    def hi(self) -> int:
        return self.lo + len(self.ranks) - 1

    def rank(self, n: int) -> int:
        if self.lo <= n <= self.hi:
            return self.ranks[n - self.lo]
        return 0

    def delta(self, n: int) -> IntMatrix:
        """Coboundary C^n -> C^{n+1} (zero-shaped outside the window)."""
        if self.lo <= n < self.hi:
            return self.deltas[n - self.lo]
        return IntMatrix.zeros(self.rank(n + 1), self.rank(n))

    def degrees(self):
        return range(self.lo, self.hi + 1)

    @staticmethod
    def single(degree: int, rank: int) -> "IntegerCochainComplex":
        return IntegerCochainComplex(degree, (rank,), ())

    @staticmethod
    def from_dict(lo: int, hi: int, ranks: dict[int, int], deltas: dict[int, IntMatrix]) -> "IntegerCochainComplex":
        rk = tuple(ranks.get(n, 0) for n in range(lo, hi + 1))
        ds = tuple(
            deltas.get(n, IntMatrix.zeros(rk[n + 1 - lo], rk[n - lo]))
            for n in range(lo, hi)
        )
        return IntegerCochainComplex(lo, rk, ds)

    def direct_sum(self, other: "IntegerCochainComplex") -> "IntegerCochainComplex":
        lo = min(self.lo, other.lo)
        hi = max(self.hi, other.hi)
        ranks = tuple(self.rank(n) + other.rank(n) for n in range(lo, hi + 1))
        deltas = []
        for n in range(lo, hi):
            a, b = self.delta(n), other.delta(n)
            rows = []
            for i in range(a.rows):
                rows.append(list(a.entries[i]) + [0] * b.cols)
            for i in range(b.rows):
                rows.append([0] * a.cols + list(b.entries[i]))
            deltas.append(IntMatrix.from_rows(rows, a.cols + b.cols))
        return IntegerCochainComplex(lo, ranks, tuple(deltas))


def validate_complex(c: IntegerCochainComplex) -> bool:
    """Check delta o delta = 0 in every degree; raises NotAComplex if not."""
    for n in range(c.lo, c.hi - 1):
        comp = c.delta(n + 1).mul(c.delta(n))
        if not comp.is_zero():
            raise NotAComplex(n)
    return True


def cohomology(c: IntegerCochainComplex, n: int) -> FGAbelianGroup:
    """H^n(c) = ker delta^n / im delta^{n-1} in canonical form."""
    if n < c.lo - 1 or n > c.hi + 1:
        # harmless but flag obviously out-of-window queries
        raise DegreeOutOfRange(f"degree {n} outside [{c.lo - 1}, {c.hi + 1}]")
    return cohomology_all(c).get(n, FGAbelianGroup.trivial())


def cohomology_all(c: IntegerCochainComplex) -> dict[int, FGAbelianGroup]:
    """Canonical forms of every H^n, sharing one Smith pass per coboundary."""
    facs = {n: invariant_factors(c.delta(n).tolists()) for n in range(c.lo, c.hi)}
    out = {}
    for n in c.degrees():
        rk_im_out = len(facs.get(n, ()))
        prev = facs.get(n - 1, ())
        rk_ker = c.rank(n) - rk_im_out
        free = rk_ker - len(prev)
        torsion = [d for d in prev if d > 1]
        out[n] = FGAbelianGroup.from_factors(free, torsion)
    return out


class CohomologyData:
    """H^n with explicit generator cocycles and class-coordinate maps."""

    def __init__(self, c: IntegerCochainComplex, n: int):
        self.degree = n
        self.rank_n = c.rank(n)
        if self.rank_n == 0:
            self.form = FGAbelianGroup.trivial()
            self.generators = ()
            self._kmat = []
            self._u = []
            self._orders_full = []
            self._kept = []
            self._image_cols = []
            return
        dn = c.delta(n).tolists()
        kb = kernel_basis(dn, self.rank_n) if c.rank(n + 1) else \
            [[1 if i == j else 0 for i in range(self.rank_n)] for j in range(self.rank_n)]
        self._kmat = [[col[i] for col in kb] for i in range(self.rank_n)]  # rank_n x k
        k = len(kb)
        prev = c.delta(n - 1)
        self._image_cols = [
            [prev.entries[i][j] for i in range(prev.rows)] for j in range(prev.cols)
        ] if prev.cols and prev.rows else []
        if k == 0:
            self.form = FGAbelianGroup.trivial()
            self.generators = ()
            self._u = []
            self._orders_full = []
            self._kept = []
            return
        if self._image_cols:
            coords = solve_matrix(self._kmat, [[col[i] for col in self._image_cols]
                                               for i in range(self.rank_n)], k)
            if coords is None:
                raise NotAComplex(n - 1, "image of the previous coboundary is not in the kernel")
            e = coords  # k x num_images
        else:
            e = [[0] * 0 for _ in range(k)]
        u, uinv, s, _, _ = smith_with_transforms(e)
        width = len(e[0]) if e and e[0] is not None else 0
        orders = []
        for i in range(k):
            d = s[i][i] if i < min(k, width) else 0
            orders.append(d)
        self._u = u
        self._orders_full = orders
        gens = []
        kept = []
        for i in range(k):
            d = orders[i]
            if d == 1:
                continue
            vec = [sum(self._kmat[row][j] * uinv[j][i] for j in range(k))
                   for row in range(self.rank_n)]
            gens.append((tuple(vec), d))
            kept.append(i)
        self._kept = kept
        self.generators = tuple(gens)
        self.form = FGAbelianGroup.from_factors(
            sum(1 for _, d in gens if d == 0), [d for _, d in gens if d > 1]
        )

    def class_coords(self, vec) -> list[int]:
        """Coordinates of a cocycle's class in the kept generator list,
        reduced modulo the generator orders."""
        if not self._kept:
            return []
        y = solve(self._kmat, list(vec), len(self._u))
        if y is None:
            raise ValueError("vector is not a cocycle")
        full = [sum(self._u[i][j] * y[j] for j in range(len(y))) for i in range(len(y))]
        out = []
        for i in self._kept:
            d = self._orders_full[i]
            out.append(full[i] % d if d else full[i])
        return out

    def classes_equal(self, a, b) -> bool:
        return self.class_coords(a) == self.class_coords(b)


@dataclass(frozen=True)
class CochainMap:
    """Degree-wise map f^n : source C^n -> target C^n commuting with delta."""

    source: IntegerCochainComplex
    target: IntegerCochainComplex
    components: dict[int, IntMatrix]

    def __post_init__(self):
        for n, m in self.components.items():
            if m.rows != self.target.rank(n) or m.cols != self.source.rank(n):
                raise DegreeMismatch(f"component at degree {n} has wrong shape")
        lo = min(self.source.lo, self.target.lo)
        hi = max(self.source.hi, self.target.hi)
        for n in range(lo, hi):
            lhs = self.target.delta(n).mul(self.component(n))
            rhs = self.component(n + 1).mul(self.source.delta(n))
            if lhs.entries != rhs.entries:
                raise DegreeMismatch(f"does not commute with coboundaries at degree {n}")

    def component(self, n: int) -> IntMatrix:
        if n in self.components:
            return self.components[n]
        return IntMatrix.zeros(self.target.rank(n), self.source.rank(n))

    @staticmethod
    def identity(c: IntegerCochainComplex) -> "CochainMap":
        comps = {n: IntMatrix.identity(c.rank(n)) for n in c.degrees()}
        return CochainMap(c, c, comps)

    @staticmethod
    def zero(source: IntegerCochainComplex, target: IntegerCochainComplex) -> "CochainMap":
        return CochainMap(source, target, {})

    def compose(self, inner: "CochainMap") -> "CochainMap":
        """self o inner (inner applied first)."""
        if inner.target is not self.source and inner.target != self.source:
            raise DegreeMismatch("composition type mismatch")
        lo = min(inner.source.lo, self.target.lo)
        hi = max(inner.source.hi, self.target.hi)
        comps = {}
        for n in range(lo, hi + 1):
            m = self.component(n).mul(inner.component(n))
            if not m.is_zero() or (m.rows and m.cols):
                comps[n] = m
        return CochainMap(inner.source, self.target, comps)


@dataclass(frozen=True)
class CochainHomotopy:
    """Maps D^n : C^n -> C'^{n-1} with d'D + Dd = f - g."""

    f: CochainMap
    g: CochainMap
    maps: dict[int, IntMatrix]

    def __post_init__(self):
        f, g = self.f, self.g
        if f.source != g.source or f.target != g.target:
            raise NotAHomotopy("f and g must share source and target")
        src, tgt = f.source, f.target
        for n, m in self.maps.items():
            if m.rows != tgt.rank(n - 1) or m.cols != src.rank(n):
                raise NotAHomotopy(f"homotopy component at degree {n} has wrong shape")
        lo = min(src.lo, tgt.lo) - 1
        hi = max(src.hi, tgt.hi) + 1
        for n in range(lo, hi + 1):
            lhs = tgt.delta(n - 1).mul(self.component(n)).entries
            rhs = self.component(n + 1).mul(src.delta(n)).entries
            diff = f.component(n).entries
            gm = g.component(n).entries
            rows = len(lhs)
            cols = len(lhs[0]) if rows else 0
            for i in range(rows):
                for j in range(cols):
                    if lhs[i][j] + rhs[i][j] != diff[i][j] - gm[i][j]:
                        raise NotAHomotopy(f"homotopy identity fails at degree {n}")

    def component(self, n: int) -> IntMatrix:
        if n in self.maps:
            return self.maps[n]
        return IntMatrix.zeros(self.f.target.rank(n - 1), self.f.source.rank(n))


def induced_map_on_cohomology(f: CochainMap, n: int):
    """Matrix of H^n(f) with respect to the kept generators on both sides.

    Returns (source_data, target_data, columns) where columns[j] are the
    target class coordinates of the image of the j-th source generator.
    """
    src = CohomologyData(f.source, n)
    tgt = CohomologyData(f.target, n)
    cols = []
    comp = f.component(n)
    for vec, _ in src.generators:
        img = comp.apply(list(vec))
        cols.append(tgt.class_coords(img))
    return src, tgt, cols
