"""Exact linear algebra over the rationals.

Everything is built on one fraction-free (Bareiss) row echelon routine that
works on integer matrices; rational inputs are scaled row by row to integers
first.  Matrices are plain lists of rows.
"""

from fractions import Fraction
from math import lcm

from .errors import DimensionMismatch, InconsistentSystem, NotSquare


def as_fraction_matrix(M):
    return [[Fraction(v) for v in row] for row in M]


def _shape(M):
    rows = len(M)
    cols = len(M[0]) if rows else 0
    for row in M:
        if len(row) != cols:
            raise DimensionMismatch("ragged matrix")
    return rows, cols


def integer_row(row):
    """Scale a rational row to integers. Returns (ints, scale) with scale > 0."""
    scale = 1
    for v in row:
        d = Fraction(v).denominator
        if d != 1:
            scale = lcm(scale, d)
    return [int(Fraction(v) * scale) for v in row], scale


def bareiss_echelon(A, ncols=None):
    """Fraction-free forward elimination of the integer matrix ``A`` in place.

    Only the first ``ncols`` columns are used for pivoting (the rest are
    carried along, e.g. a right-hand side or an identity block).  Returns
    ``(pivots, swaps)`` where ``pivots`` lists pivot column indices in row
    order and ``swaps`` counts row exchanges.
    """
    m = len(A)
    if m == 0:
        return [], 0
    total = len(A[0])
    ncols = total if ncols is None else ncols
    prev = 1
    r = 0
    pivots = []
    swaps = 0
    for c in range(ncols):
        if r == m:
            break
        p = next((i for i in range(r, m) if A[i][c] != 0), None)
        if p is None:
            continue
        if p != r:
            A[r], A[p] = A[p], A[r]
            swaps += 1
        piv = A[r][c]
        pr = A[r]
        for i in range(r + 1, m):
            a = A[i][c]
            row = A[i]
            if a == 0:
                if piv != prev:
                    A[i] = [(x * piv) // prev for x in row]
            else:
                A[i] = [(x * piv - a * y) // prev for x, y in zip(row, pr)]
        prev = piv
        pivots.append(c)
        r += 1
    return pivots, swaps


def determinant(M):
    """Exact determinant by Bareiss elimination."""
    M = as_fraction_matrix(M)
    n, cols = _shape(M)
    if n != cols:
        raise NotSquare(f"matrix is {n}x{cols}")
    if n == 0:
        return Fraction(1)
    A = []
    scale = 1
    for row in M:
        ints, s = integer_row(row)
        A.append(ints)
        scale *= s
    pivots, swaps = bareiss_echelon(A)
    if len(pivots) < n:
        return Fraction(0)
    det = A[n - 1][n - 1]
    if swaps % 2:
        det = -det
    return Fraction(det, scale)


def _rref(M, ncols=None):
    """Reduced row echelon form with Fraction entries; returns (R, pivots)."""
    A = [integer_row(row)[0] for row in M]
    pivots, _ = bareiss_echelon(A, ncols)
    R = [[Fraction(x) for x in A[i]] for i in range(len(pivots))]
    for r, c in enumerate(pivots):
        p = R[r][c]
        R[r] = [x / p for x in R[r]]
    for r in range(len(pivots) - 1, -1, -1):
        c = pivots[r]
        for i in range(r):
            f = R[i][c]
            if f:
                R[i] = [x - f * y for x, y in zip(R[i], R[r])]
    return R, pivots


def rank(M):
    M = as_fraction_matrix(M)
    if not M or not M[0]:
        return 0
    A = [integer_row(row)[0] for row in M]
    pivots, _ = bareiss_echelon(A)
    return len(pivots)


def transpose(M, ncols=None):
    if not M:
        return [[] for _ in range(ncols or 0)]
    return [list(col) for col in zip(*M)]


def nullspace(M, ncols=None):
    """Basis of {x : M x = 0}, one vector per free column, in column order."""
    M = as_fraction_matrix(M)
    n = len(M[0]) if M else (ncols or 0)
    if not M:
        return [[Fraction(int(i == j)) for i in range(n)] for j in range(n)]
    R, pivots = _rref(M)
    free = [j for j in range(n) if j not in set(pivots)]
    basis = []
    for f in free:
        x = [Fraction(0)] * n
        x[f] = Fraction(1)
        for r, c in enumerate(pivots):
            x[c] = -R[r][f]
        basis.append(x)
    return basis


def left_nullspace(M, nrows=None):
    """Basis of {y : y M = 0}."""
    m = len(M) if M else (nrows or 0)
    if not M or not M[0]:
        return [[Fraction(int(i == j)) for i in range(m)] for j in range(m)]
    return nullspace(transpose(M))


def independent_columns(M):
    """Indices of a maximal independent set of columns, greedily from the left."""
    M = as_fraction_matrix(M)
    if not M or not M[0]:
        return []
    A = [integer_row(row)[0] for row in M]
    pivots, _ = bareiss_echelon(A)
    return pivots


def solve_linear_system(M, rhs):
    """Solve ``M x = rhs`` exactly.

    Returns ``(particular, nullspace_basis)``.  Raises
    :class:`InconsistentSystem` carrying a left-kernel certificate ``y`` with
    ``y M = 0`` and ``y . rhs != 0`` when no solution exists.
    """
    M = as_fraction_matrix(M)
    rhs = [Fraction(v) for v in rhs]
    m = len(M)
    if m != len(rhs):
        raise DimensionMismatch(f"{m} rows but rhs of length {len(rhs)}")
    if m == 0:
        return [], []
    n = _shape(M)[1]
    # [M | rhs | I]: the identity block records the row operations
    A = []
    for i, row in enumerate(M):
        ints, _ = integer_row(row + [rhs[i]] + [Fraction(int(i == j)) for j in range(m)])
        A.append(ints)
    pivots, _ = bareiss_echelon(A, n)
    for i in range(len(pivots), m):
        if A[i][n] != 0:
            y = [Fraction(v) for v in A[i][n + 1:]]
            g = _content(y)
            raise InconsistentSystem([v / g for v in y])
    R, piv2 = _rref([row + [b] for row, b in zip(M, rhs)], n)
    x = [Fraction(0)] * n
    for r, c in enumerate(piv2):
        x[c] = R[r][n]
    return x, nullspace(M)


def _content(v):
    """Positive rational that normalises an integer-valued certificate for display."""
    from math import gcd

    g = 0
    for a in v:
        g = gcd(g, int(a))
    return Fraction(g or 1)


def matvec(M, x):
    return [sum((a * b for a, b in zip(row, x)), Fraction(0)) for row in M]


def dot(u, v):
    return sum((a * b for a, b in zip(u, v)), Fraction(0))
