from fractions import Fraction
from itertools import permutations

import pytest
from hypothesis import given, settings, strategies as st

from colmkt.errors import DimensionMismatch, InconsistentSystem, NotSquare
from colmkt.linalg import determinant, left_nullspace, matvec, nullspace, rank, solve_linear_system

F = Fraction

rationals = st.fractions(min_value=-5, max_value=5, max_denominator=4)


def matrices(rows, cols):
    return st.lists(st.lists(rationals, min_size=cols, max_size=cols), min_size=rows, max_size=rows)


def leibniz(M):
    """Permutation expansion; independent of any elimination."""
    n = len(M)
    total = F(0)
    for perm in permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = F(-1) ** inv
        for i, p in enumerate(perm):
            term *= M[i][p]
        total += term
    return total


def test_identity_determinant():
    eye = [[int(i == j) for j in range(6)] for i in range(6)]
    assert determinant(eye) == 1


def test_repeated_row_determinant():
    M = [[1, 2, 3], [4, 5, 6], [1, 2, 3]]
    assert determinant(M) == 0


def test_not_square():
    with pytest.raises(NotSquare):
        determinant([[1, 2, 3], [4, 5, 6]])


def test_identity_solve():
    eye = [[int(i == j) for j in range(4)] for i in range(4)]
    x, basis = solve_linear_system(eye, [3, F(1, 2), -1, 0])
    assert x == [3, F(1, 2), -1, 0] and basis == []


def test_inconsistent_certificate():
    with pytest.raises(InconsistentSystem) as exc:
        solve_linear_system([[1], [1]], [0, 1])
    y = exc.value.certificate
    assert y[0] + y[1] == 0 and y[1] != 0


def test_rhs_length_mismatch():
    with pytest.raises(DimensionMismatch):
        solve_linear_system([[1, 0]], [1, 2])


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: matrices(n, n)))
def test_determinant_matches_permutation_expansion(M):
    assert determinant(M) == leibniz([[F(v) for v in row] for row in M])


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4).flatmap(lambda m: st.integers(1, 5).flatmap(lambda n: matrices(m, n))), st.data())
def test_solve_or_certificate(M, data):
    rhs = data.draw(st.lists(rationals, min_size=len(M), max_size=len(M)))
    try:
        x, basis = solve_linear_system(M, rhs)
    except InconsistentSystem as exc:
        y = exc.certificate
        n = len(M[0])
        assert all(sum(y[i] * M[i][j] for i in range(len(M))) == 0 for j in range(n))
        assert sum(a * b for a, b in zip(y, rhs)) != 0
        return
    assert matvec(M, x) == [F(v) for v in rhs]
    assert len(basis) == len(M[0]) - rank(M)
    for b in basis:
        assert all(v == 0 for v in matvec(M, b))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4).flatmap(lambda m: st.integers(1, 4).flatmap(lambda n: matrices(m, n))))
def test_rank_nullity(M):
    assert rank(M) + len(nullspace(M)) == len(M[0])
    for y in left_nullspace(M):
        assert all(sum(y[i] * M[i][j] for i in range(len(M))) == 0 for j in range(len(M[0])))
