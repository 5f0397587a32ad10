"""Polytopes in H-representation with exact vertex enumeration."""

import os
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from .errors import DimensionLimitExceeded, DimensionMismatch, InconsistentSystem, PointNotStrictlyInterior
from .linalg import nullspace, rank, solve_linear_system
from .lp import LinearProgram, solve_lp

DEFAULT_MAX_VERTEX_DIM = 24


def max_vertex_dim(override=None):
    if override is not None:
        return int(override)
    env = os.environ.get("COLMKT_MAX_VERTEX_DIM")
    return int(env) if env else DEFAULT_MAX_VERTEX_DIM


@dataclass(frozen=True)
class Polytope:
    """{x : C x = d, x_k >= 0 where nonneg[k], A x <= b}."""

    n: int
    eq_matrix: tuple = ()
    eq_rhs: tuple = ()
    nonneg: tuple = None
    ub_matrix: tuple = ()
    ub_rhs: tuple = ()

    def __post_init__(self):
        fm = lambda M: tuple(tuple(Fraction(v) for v in row) for row in M)
        object.__setattr__(self, "eq_matrix", fm(self.eq_matrix))
        object.__setattr__(self, "eq_rhs", tuple(Fraction(v) for v in self.eq_rhs))
        object.__setattr__(self, "ub_matrix", fm(self.ub_matrix))
        object.__setattr__(self, "ub_rhs", tuple(Fraction(v) for v in self.ub_rhs))
        nn = (True,) * self.n if self.nonneg is None else tuple(bool(v) for v in self.nonneg)
        object.__setattr__(self, "nonneg", nn)
        if len(nn) != self.n or len(self.eq_matrix) != len(self.eq_rhs) or len(self.ub_matrix) != len(self.ub_rhs):
            raise DimensionMismatch("polytope data has inconsistent dimensions")
        if any(len(row) != self.n for row in self.eq_matrix + self.ub_matrix):
            raise DimensionMismatch("constraint row length differs from the dimension")

    def contains(self, x) -> bool:
        x = [Fraction(v) for v in x]
        if len(x) != self.n:
            return False
        if any(f and v < 0 for f, v in zip(self.nonneg, x)):
            return False
        for row, rhs in zip(self.eq_matrix, self.eq_rhs):
            if sum(a * b for a, b in zip(row, x)) != rhs:
                return False
        return all(sum(a * b for a, b in zip(row, x)) <= rhs for row, rhs in zip(self.ub_matrix, self.ub_rhs))

    def linear_program(self, objective, sense="max", extra_eq=(), extra_eq_rhs=()):
        return LinearProgram(
            objective=tuple(objective),
            eq_matrix=self.eq_matrix + tuple(tuple(r) for r in extra_eq),
            eq_rhs=self.eq_rhs + tuple(extra_eq_rhs),
            ub_matrix=self.ub_matrix,
            ub_rhs=self.ub_rhs,
            sense=sense,
            lower_bounds=tuple(Fraction(0) if f else None for f in self.nonneg),
        )

    def optimize(self, objective, sense="max"):
        return solve_lp(self.linear_program(objective, sense))

    @cached_property
    def vertices(self):
        return enumerate_vertices(self)


def _constraint_rows(poly):
    """All inequality constraints as (g, h) meaning g . x <= h."""
    rows = []
    for k, flag in enumerate(poly.nonneg):
        if flag:
            g = [Fraction(0)] * poly.n
            g[k] = Fraction(-1)
            rows.append((g, Fraction(0)))
    for g, h in zip(poly.ub_matrix, poly.ub_rhs):
        rows.append((list(g), h))
    return rows


def enumerate_vertices(poly: Polytope, limit=None):
    """All vertices, deduplicated and sorted lexicographically.

    The equality system is parametrised as ``x = x0 + N z``; a vertex is a
    feasible point where ``dim z`` linearly independent inequalities are
    tight.  Candidate tight sets are explored depth first, skipping any
    constraint that is linearly dependent on those already chosen.
    """
    lim = max_vertex_dim(limit)
    if poly.n > lim:
        raise DimensionLimitExceeded(poly.n, lim)
    if poly.eq_matrix:
        try:
            x0, basis = solve_linear_system([list(r) for r in poly.eq_matrix], list(poly.eq_rhs))
        except InconsistentSystem:
            return []
    else:
        x0 = [Fraction(0)] * poly.n
        basis = nullspace([], poly.n)
    r = len(basis)
    if r == 0:
        return [tuple(x0)] if poly.contains(x0) else []
    cons = []
    for g, h in _constraint_rows(poly):
        a = [sum(gk * b[k] for k, gk in enumerate(g) if gk) for b in basis]
        rhs = h - sum(gk * xk for gk, xk in zip(g, x0) if gk)
        cons.append((a, rhs))
    m = len(cons)
    found = set()

    def point(rows):
        # rows are fully reduced with r pivots -> z read off directly
        z = [Fraction(0)] * r
        for piv, a, rhs in rows:
            z[piv] = rhs
        return tuple(xk + sum(zj * b[k] for zj, b in zip(z, basis)) for k, xk in enumerate(x0))

    def add(rows, a, rhs):
        a = list(a)
        for piv, ra, rr in rows:
            f = a[piv]
            if f:
                a = [x - f * y for x, y in zip(a, ra)]
                rhs -= f * rr
        piv = next((j for j, v in enumerate(a) if v), None)
        if piv is None:
            return None
        p = a[piv]
        a = [v / p for v in a]
        rhs /= p
        out = []
        for opiv, ra, rr in rows:
            f = ra[piv]
            if f:
                ra = [x - f * y for x, y in zip(ra, a)]
                rr -= f * rhs
            out.append((opiv, ra, rr))
        out.append((piv, a, rhs))
        return out

    def dfs(start, rows):
        if len(rows) == r:
            x = point(rows)
            if poly.contains(x):
                found.add(x)
            return
        need = r - len(rows)
        for k in range(start, m - need + 1):
            nxt = add(rows, *cons[k])
            if nxt is not None:
                dfs(k + 1, nxt)

    dfs(0, [])
    return sorted(found)


def affine_dimension(poly: Polytope, interior_point) -> int:
    """Dimension of the polytope, given a point strictly inside every inequality."""
    x = [Fraction(v) for v in interior_point]
    if len(x) != poly.n:
        raise DimensionMismatch("point has the wrong dimension")
    for row, rhs in zip(poly.eq_matrix, poly.eq_rhs):
        if sum(a * b for a, b in zip(row, x)) != rhs:
            raise PointNotStrictlyInterior("point violates an equality")
    for g, h in _constraint_rows(poly):
        if not sum(a * b for a, b in zip(g, x)) < h:
            raise PointNotStrictlyInterior("point does not satisfy every inequality strictly")
    if not poly.eq_matrix:
        return poly.n
    return poly.n - rank([list(r) for r in poly.eq_matrix])
