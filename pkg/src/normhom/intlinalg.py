"""Exact integer linear algebra: Smith normal form, kernels, solves.

Everything here works over arbitrary-precision Python ints.  Matrices are
row-major lists of lists at the algorithm level; the immutable ``IntMatrix``
wrapper is the value type used across the package.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd


@dataclass(frozen=True)
class IntMatrix:
    """Immutable integer matrix (row-major)."""

    rows: int
    cols: int
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.entries) != self.rows:
            raise ValueError(f"expected {self.rows} rows, got {len(self.entries)}")
        for row in self.entries:
            if len(row) != self.cols:
                raise ValueError(f"ragged row: expected {self.cols} columns")

    @staticmethod
    def from_rows(rows: list[list[int]], cols: int | None = None) -> "IntMatrix":
        m = len(rows)
        if cols is None:
            if m == 0:
                raise ValueError("column count required for a 0-row matrix")
            cols = len(rows[0])
        return IntMatrix(m, cols, tuple(tuple(int(x) for x in row) for row in rows))

    @staticmethod
    def zeros(rows: int, cols: int) -> "IntMatrix":
        return IntMatrix(rows, cols, tuple(tuple(0 for _ in range(cols)) for _ in range(rows)))

    @staticmethod
    def identity(n: int) -> "IntMatrix":
        return IntMatrix(n, n, tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))

    def tolists(self) -> list[list[int]]:
        return [list(row) for row in self.entries]

    def transpose(self) -> "IntMatrix":
        return IntMatrix(self.cols, self.rows,
                         tuple(tuple(self.entries[i][j] for i in range(self.rows))
                               for j in range(self.cols)))

    def mul(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch: {self.rows}x{self.cols} * {other.rows}x{other.cols}")
        rows = tuple(
            tuple(sum(self.entries[i][k] * other.entries[k][j] for k in range(self.cols))
                  for j in range(other.cols))
            for i in range(self.rows)
        )
        return IntMatrix(self.rows, other.cols, rows)

    def apply(self, vec: list[int]) -> list[int]:
        if len(vec) != self.cols:
            raise ValueError("vector length mismatch")
        return [sum(r[j] * vec[j] for j in range(self.cols)) for r in self.entries]

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.entries for x in row)

    def __str__(self):
        return "[" + "; ".join(" ".join(str(x) for x in row) for row in self.entries) + "]"


# ---------------------------------------------------------------------------
# list-of-lists core


def matmul(a: list[list[int]], b: list[list[int]], inner: int | None = None,
           out_cols: int | None = None) -> list[list[int]]:
    m = len(a)
    if inner is None:
        inner = len(a[0]) if m else 0
    n = out_cols if out_cols is not None else (len(b[0]) if b else 0)
    out = []
    for i in range(m):
        ai = a[i]
        row = [0] * n
        for k in range(inner):
            c = ai[k]
            if c:
                bk = b[k]
                for j in range(n):
                    row[j] += c * bk[j]
        out.append(row)
    return out


def mat_identity(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_copy(a: list[list[int]]) -> list[list[int]]:
    return [row[:] for row in a]


def mat_is_zero(a) -> bool:
    return all(x == 0 for row in a for x in row)


def _find_pivot(s, m, n, k):
    """Smallest |entry| > 0 in the trailing submatrix, row-major tie break."""
    best = None
    bi = bj = -1
    for i in range(k, m):
        si = s[i]
        for j in range(k, n):
            v = si[j]
            if v:
                a = -v if v < 0 else v
                if best is None or a < best:
                    best, bi, bj = a, i, j
                    if a == 1:
                        return bi, bj
    return (bi, bj) if best is not None else None


def invariant_factors(a: list[list[int]]) -> list[int]:
    """Nonzero diagonal of the Smith form of ``a`` (d1 | d2 | ...), no transforms."""
    m = len(a)
    n = len(a[0]) if m else 0
    s = [row[:] for row in a]
    out = []
    k = 0
    while k < min(m, n):
        loc = _find_pivot(s, m, n, k)
        if loc is None:
            break
        pi, pj = loc
        if pi != k:
            s[k], s[pi] = s[pi], s[k]
        if pj != k:
            for row in s:
                row[k], row[pj] = row[pj], row[k]
        while True:
            p = s[k][k]
            if p < 0:
                s[k] = [-x for x in s[k]]
                p = -p
            dirty = False
            for i in range(k + 1, m):
                v = s[i][k]
                if v:
                    q = v // p
                    if q:
                        sk = s[k]
                        si = s[i]
                        for j in range(k, n):
                            si[j] -= q * sk[j]
                    if s[i][k]:
                        s[k], s[i] = s[i], s[k]
                        dirty = True
                        break
            if dirty:
                continue
            for j in range(k + 1, n):
                v = s[k][j]
                if v:
                    q = v // p
                    if q:
                        for row in s:
                            row[j] -= q * row[k]
                    if s[k][j]:
                        for row in s:
                            row[k], row[j] = row[j], row[k]
                        dirty = True
                        break
            if dirty:
                continue
            # pivot must divide the rest of the submatrix for the chain property
            bad = None
            for i in range(k + 1, m):
                si = s[i]
                for j in range(k + 1, n):
                    if si[j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            sk = s[k]
            sb = s[bad]
            for j in range(k, n):
                sk[j] += sb[j]
        out.append(s[k][k])
        k += 1
    return out


def smith_with_transforms(a: list[list[int]]):
    """Return (U, Uinv, S, V, Vinv) with U*a*V = S in Smith normal form.

    U, V are unimodular together with their exact inverses; S is diagonal
    with non-negative entries satisfying the divisibility chain.
    """
    m = len(a)
    n = len(a[0]) if m else 0
    s = [row[:] for row in a]
    u = mat_identity(m)
    uinv = mat_identity(m)
    v = mat_identity(n)
    vinv = mat_identity(n)

    def row_swap(i, j):
        s[i], s[j] = s[j], s[i]
        u[i], u[j] = u[j], u[i]
        for r in uinv:
            r[i], r[j] = r[j], r[i]

    def col_swap(i, j):
        for r in s:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]
        vinv[i], vinv[j] = vinv[j], vinv[i]

    def row_add(i, j, q):
        # row_i += q * row_j
        si, sj = s[i], s[j]
        for t in range(n):
            si[t] += q * sj[t]
        ui, uj = u[i], u[j]
        for t in range(m):
            ui[t] += q * uj[t]
        for r in uinv:
            r[j] -= q * r[i]

    def col_add(i, j, q):
        # col_i += q * col_j
        for r in s:
            r[i] += q * r[j]
        for r in v:
            r[i] += q * r[j]
        vi, vj = vinv[i], vinv[j]
        for t in range(n):
            vj[t] -= q * vi[t]

    def row_negate(i):
        s[i] = [-x for x in s[i]]
        u[i] = [-x for x in u[i]]
        for r in uinv:
            r[i] = -r[i]

    k = 0
    while k < min(m, n):
        loc = _find_pivot(s, m, n, k)
        if loc is None:
            break
        pi, pj = loc
        if pi != k:
            row_swap(k, pi)
        if pj != k:
            col_swap(k, pj)
        while True:
            if s[k][k] < 0:
                row_negate(k)
            p = s[k][k]
            dirty = False
            for i in range(k + 1, m):
                val = s[i][k]
                if val:
                    q = val // p
                    if q:
                        row_add(i, k, -q)
                    if s[i][k]:
                        row_swap(k, i)
                        dirty = True
                        break
            if dirty:
                continue
            for j in range(k + 1, n):
                val = s[k][j]
                if val:
                    q = val // p
                    if q:
                        col_add(j, k, -q)
                    if s[k][j]:
                        col_swap(k, j)
                        dirty = True
                        break
            if dirty:
                continue
            bad = None
            for i in range(k + 1, m):
                si = s[i]
                for j in range(k + 1, n):
                    if si[j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            row_add(k, bad, 1)
        k += 1
    return u, uinv, s, v, vinv


def rank(a: list[list[int]]) -> int:
    return len(invariant_factors(a))


def kernel_basis(a: list[list[int]], cols: int | None = None) -> list[list[int]]:
    """Basis (list of column vectors) of the integer kernel of ``a``.

    The returned lattice is saturated: it is the full kernel, not a finite
    index sublattice.
    """
    m = len(a)
    if cols is None:
        cols = len(a[0]) if m else 0
    if cols == 0:
        return []
    if m == 0:
        return [[1 if i == j else 0 for i in range(cols)] for j in range(cols)]
    _, _, s, v, _ = smith_with_transforms(a)
    r = 0
    for i in range(min(m, cols)):
        if s[i][i]:
            r += 1
    return [[v[i][j] for i in range(cols)] for j in range(r, cols)]


def solve(a: list[list[int]], b: list[int], cols: int | None = None) -> list[int] | None:
    """A particular integer solution x of a*x = b, or None."""
    m = len(a)
    if cols is None:
        cols = len(a[0]) if m else 0
    if m == 0:
        return [0] * cols
    sol = solve_matrix(a, [[x] for x in b], cols)
    if sol is None:
        return None
    return [row[0] for row in sol]


def solve_matrix(a: list[list[int]], b: list[list[int]], cols: int | None = None) -> list[list[int]] | None:
    """Integer solution X of a*X = b (b given as rows), or None."""
    m = len(a)
    if cols is None:
        cols = len(a[0]) if m else 0
    nrhs = len(b[0]) if b else 0
    if m == 0:
        return [[0] * nrhs for _ in range(cols)]
    u, _, s, v, _ = smith_with_transforms(a)
    c = matmul(u, b, m)
    y = [[0] * nrhs for _ in range(cols)]
    for i in range(m):
        si = s[i][i] if i < min(m, cols) else 0
        for j in range(nrhs):
            ci = c[i][j]
            if si:
                if ci % si:
                    return None
                y[i][j] = ci // si
            elif ci:
                return None
    return matmul(v, y, cols)


def solve_mod(a: list[list[int]], b: list[int], modulus: int, cols: int | None = None) -> list[int] | None:
    """Solve a*x = b (mod modulus) over the integers; None if unsolvable."""
    m = len(a)
    if cols is None:
        cols = len(a[0]) if m else 0
    if modulus <= 0:
        raise ValueError("modulus must be positive")
    aug = [row[:] + [modulus if i == j else 0 for j in range(m)] for i, row in enumerate(a)]
    sol = solve(aug, b, cols + m)
    if sol is None:
        return None
    return sol[:cols]


def determinant(a: list[list[int]]) -> int:
    """Fraction-free Bareiss determinant."""
    n = len(a)
    if n == 0:
        return 1
    if any(len(row) != n for row in a):
        raise ValueError("determinant of a non-square matrix")
    m = [row[:] for row in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k]), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def column_space_basis(a: list[list[int]], cols: int | None = None):
    """Basis of the column lattice of ``a`` as a list of column vectors."""
    m = len(a)
    if cols is None:
        cols = len(a[0]) if m else 0
    if m == 0 or cols == 0:
        return []
    u, uinv, s, _, _ = smith_with_transforms(a)
    out = []
    for i in range(min(m, cols)):
        d = s[i][i]
        if d:
            out.append([uinv[r][i] * d for r in range(m)])
    return out


def solve_rational(a: list[list[Fraction]], b: list[Fraction]) -> list[Fraction] | None:
    """Particular rational solution of a*x = b by Gaussian elimination."""
    m = len(a)
    n = len(a[0]) if m else 0
    mat = [[Fraction(x) for x in row] + [Fraction(b[i])] for i, row in enumerate(a)]
    pivots = []
    r = 0
    for c in range(n):
        pr = next((i for i in range(r, m) if mat[i][c] != 0), None)
        if pr is None:
            continue
        mat[r], mat[pr] = mat[pr], mat[r]
        pv = mat[r][c]
        mat[r] = [x / pv for x in mat[r]]
        for i in range(m):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [x - f * y for x, y in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if mat[i][n] != 0:
            return None
    x = [Fraction(0)] * n
    for i, c in enumerate(pivots):
        x[c] = mat[i][n]
    return x


def lcm(a: int, b: int) -> int:
    if a == 0 or b == 0:
        return 0
    return abs(a * b) // gcd(a, b)
