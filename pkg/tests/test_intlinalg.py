import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from normhom.intlinalg import (
    IntMatrix,
    determinant,
    invariant_factors,
    kernel_basis,
    matmul,
    smith_with_transforms,
    solve,
    solve_matrix,
    solve_mod,
    column_space_basis,
)


def brute_force_divisors(a):
    """Oracle for 2x2: d1 = gcd of entries, d1*d2 = |det|."""
    from math import gcd

    g = 0
    for row in a:
        for x in row:
            g = gcd(g, x)
    d = abs(determinant(a))
    return g, d


small_matrices = st.integers(min_value=1, max_value=5).flatmap(
    lambda m: st.integers(min_value=1, max_value=5).flatmap(
        lambda n: st.lists(
            st.lists(st.integers(min_value=-9, max_value=9), min_size=n, max_size=n),
            min_size=m,
            max_size=m,
        )
    )
)


def test_snf_frozen_example():
    # d1 = gcd of entries = 2, d1*d2 = |det| = |2*8-4*6| = 8 => diag(2, 4)
    a = [[2, 4], [6, 8]]
    g, d = brute_force_divisors(a)
    assert (g, d) == (2, 8)
    assert invariant_factors(a) == [2, 4]


def test_snf_zero_and_identity():
    assert invariant_factors([[0, 0, 0], [0, 0, 0]]) == []
    assert invariant_factors([[1, 0, 0], [0, 1, 0], [0, 0, 1]]) == [1, 1, 1]


@settings(max_examples=200, deadline=None)
@given(small_matrices)
def test_snf_transform_identity(a):
    m = len(a)
    n = len(a[0])
    u, uinv, s, v, vinv = smith_with_transforms(a)
    # U * A * V = S
    assert matmul(matmul(u, a, m), v, n) == s
    # transforms are unimodular with exact inverses
    assert abs(determinant(u)) == 1
    assert abs(determinant(v)) == 1
    assert matmul(u, uinv, m) == [[1 if i == j else 0 for j in range(m)] for i in range(m)]
    assert matmul(v, vinv, n) == [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    # diagonal, non-negative, divisibility chain
    diag = []
    for i in range(m):
        for j in range(n):
            if i != j:
                assert s[i][j] == 0
            elif s[i][j]:
                diag.append(s[i][j])
    assert all(d > 0 for d in diag)
    for x, y in zip(diag, diag[1:]):
        assert y % x == 0
    assert diag == invariant_factors(a)


@settings(max_examples=150, deadline=None)
@given(small_matrices)
def test_kernel_and_solve(a):
    m, n = len(a), len(a[0])
    ker = kernel_basis(a, n)
    for vec in ker:
        assert all(sum(a[i][j] * vec[j] for j in range(n)) == 0 for i in range(m))
    rk = len(invariant_factors(a))
    assert len(ker) == n - rk
    # a * (a applied to a random vector) is always solvable
    rng = random.Random(7)
    x = [rng.randint(-4, 4) for _ in range(n)]
    b = [sum(a[i][j] * x[j] for j in range(n)) for i in range(m)]
    sol = solve(a, b, n)
    assert sol is not None
    assert [sum(a[i][j] * sol[j] for j in range(n)) for i in range(m)] == b


def test_solve_unsolvable():
    assert solve([[2]], [1]) is None
    assert solve([[2, 0], [0, 3]], [1, 1]) is None
    assert solve([[2, 3]], [1]) is not None  # gcd(2,3)=1


def test_solve_mod():
    sol = solve_mod([[2]], [3], 5)
    assert sol is not None and (2 * sol[0] - 3) % 5 == 0
    assert solve_mod([[2]], [1], 4) is None  # 2x = 1 mod 4 unsolvable


def test_kernel_saturated():
    # kernel of [[2, -2]] is generated by (1,1), not (2,2)
    ker = kernel_basis([[2, -2]], 2)
    assert len(ker) == 1
    assert abs(ker[0][0]) == 1


def test_column_space_basis():
    basis = column_space_basis([[2, 0], [0, 0]], 2)
    assert len(basis) == 1
    assert basis[0] in ([2, 0], [-2, 0])


def test_empty_edge_cases():
    assert kernel_basis([], 3) == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    assert solve([], [], 2) == [0, 0]
    assert invariant_factors([]) == []
    assert determinant([]) == 1


def test_int_matrix_wrapper():
    m = IntMatrix.from_rows([[1, 2], [3, 4]])
    assert m.transpose().entries == ((1, 3), (2, 4))
    assert m.mul(IntMatrix.identity(2)).entries == m.entries
    assert m.apply([1, 1]) == [3, 7]
    with pytest.raises(ValueError):
        IntMatrix(2, 2, ((1,),))
