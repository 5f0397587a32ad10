"""Exact rational linear programming.

Two-phase primal simplex on an integer-preserving tableau: every entry is an
integer and the true tableau value is ``entry / D`` with ``D`` the current
basis determinant (Edmonds/Bareiss pivoting).  Bland's rule picks the
entering column (lowest index with negative reduced cost) and breaks ratio
ties by the lowest basic variable index, so the method terminates and is
deterministic.

Problems are stated as::

    minimize / maximize   c . x
    subject to            C x  = d
                          A x <= b
                          x_j >= l_j   for j with a lower bound, free otherwise

Alongside the primal solution the solver returns exact dual multipliers
(optimal), a Farkas certificate (infeasible) or an improving ray
(unbounded).  ``verify_*`` functions recheck these from scratch.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm

from .errors import DimensionMismatch

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_ZERO = Fraction(0)


def _frac_vec(v):
    return tuple(Fraction(x) for x in v)


def _frac_mat(M):
    return tuple(tuple(Fraction(x) for x in row) for row in M)


@dataclass(frozen=True)
class LinearProgram:
    objective: tuple
    eq_matrix: tuple = ()
    eq_rhs: tuple = ()
    ub_matrix: tuple = ()
    ub_rhs: tuple = ()
    sense: str = "min"
    lower_bounds: tuple = None  # per variable: Fraction or None (free); None means all free

    def __post_init__(self):
        n = len(self.objective)
        object.__setattr__(self, "objective", _frac_vec(self.objective))
        object.__setattr__(self, "eq_matrix", _frac_mat(self.eq_matrix))
        object.__setattr__(self, "eq_rhs", _frac_vec(self.eq_rhs))
        object.__setattr__(self, "ub_matrix", _frac_mat(self.ub_matrix))
        object.__setattr__(self, "ub_rhs", _frac_vec(self.ub_rhs))
        lb = self.lower_bounds
        lb = (None,) * n if lb is None else tuple(None if v is None else Fraction(v) for v in lb)
        object.__setattr__(self, "lower_bounds", lb)
        if self.sense not in ("min", "max"):
            raise ValueError(f"sense must be 'min' or 'max', got {self.sense!r}")
        if len(self.eq_matrix) != len(self.eq_rhs) or len(self.ub_matrix) != len(self.ub_rhs):
            raise DimensionMismatch("constraint rows and right-hand sides differ in length")
        for row in self.eq_matrix + self.ub_matrix:
            if len(row) != n:
                raise DimensionMismatch(f"constraint row of length {len(row)}, expected {n}")
        if len(lb) != n:
            raise DimensionMismatch(f"{len(lb)} lower bounds for {n} variables")

    @property
    def n(self):
        return len(self.objective)


@dataclass(frozen=True)
class LPResult:
    status: str
    value: Fraction = None
    x: tuple = None
    # optimal: multipliers of the min-normalised problem (eq free, ub <= 0)
    eq_duals: tuple = None
    ub_duals: tuple = None
    # infeasible: u (eq, free), v (ub, >= 0) proving infeasibility
    farkas: tuple = None
    # unbounded: a feasible point and an improving direction
    ray: tuple = None
    pivots: int = field(default=0, compare=False)

    @property
    def optimal(self):
        return self.status == OPTIMAL


class _Tableau:
    """Integer tableau; row ``m`` is the reduced-cost row."""

    def __init__(self, rows, basis):
        self.rows = rows
        self.basis = basis
        self.D = 1
        self.m = len(basis)
        self.pivots = 0

    def pivot(self, r, s):
        rows = self.rows
        p = rows[r][s]
        D = self.D
        pr = rows[r]
        for i in range(len(rows)):
            if i == r:
                continue
            a = rows[i][s]
            if a == 0:
                if p != D:
                    rows[i] = [(x * p) // D for x in rows[i]]
            else:
                rows[i] = [(x * p - a * y) // D for x, y in zip(rows[i], pr)]
        self.D = p
        if p < 0:
            self.rows = [[-x for x in row] for row in rows]
            self.D = -p
        self.basis[r] = s
        self.pivots += 1

    def run(self, allowed):
        """Bland iterations on the cost row. Returns None or an unbounded column."""
        rows = self.rows
        m = self.m
        while True:
            rows = self.rows
            z = rows[m]
            s = next((j for j in allowed if z[j] < 0), None)
            if s is None:
                return None
            r = None
            for i in range(m):
                a = rows[i][s]
                if a > 0:
                    if r is None:
                        r = i
                        continue
                    # ratio rows[i][-1]/a vs rows[r][-1]/rows[r][s]
                    lhs = rows[i][-1] * rows[r][s]
                    rhs = rows[r][-1] * a
                    if lhs < rhs or (lhs == rhs and self.basis[i] < self.basis[r]):
                        r = i
            if r is None:
                return s
            self.pivot(r, s)


def solve_lp(lp: LinearProgram) -> LPResult:
    n = lp.n
    C, d, A, b = lp.eq_matrix, lp.eq_rhs, lp.ub_matrix, lp.ub_rhs
    lb = lp.lower_bounds
    sign = 1 if lp.sense == "min" else -1
    cmin = [sign * c for c in lp.objective]

    # standard-form columns for the original variables
    colmap = []  # per original var: (plus_col, minus_col or None)
    ncol = 0
    for j in range(n):
        if lb[j] is None:
            colmap.append((ncol, ncol + 1))
            ncol += 2
        else:
            colmap.append((ncol, None))
            ncol += 1
    nreal = ncol
    shift = [v if v is not None else _ZERO for v in lb]

    orig_rows = list(C) + list(A)
    orig_rhs = list(d) + list(b)
    m = len(orig_rows)
    n_eq = len(C)
    scales, sigmas = [], []
    int_rows = []
    for r, row in enumerate(orig_rows):
        rhs = orig_rhs[r] - sum((row[j] * shift[j] for j in range(n) if shift[j]), _ZERO)
        vals = [None] * nreal
        for j in range(n):
            p, q = colmap[j]
            vals[p] = row[j]
            if q is not None:
                vals[q] = -row[j]
        scale = 1
        for v in vals + [rhs]:
            if v.denominator != 1:
                scale = lcm(scale, v.denominator)
        ints = [int(v * scale) for v in vals]
        irhs = int(rhs * scale)
        sigma = 1
        if irhs < 0:
            sigma = -1
            ints = [-x for x in ints]
            irhs = -irhs
        scales.append(scale)
        sigmas.append(sigma)
        int_rows.append((ints, irhs))

    # slack columns for inequality rows, artificial columns where no +identity exists
    slack_col = {}
    for r in range(n_eq, m):
        slack_col[r] = ncol
        ncol += 1
    id_col = [None] * m
    art_cols = []
    for r in range(m):
        if r >= n_eq and sigmas[r] == 1:
            id_col[r] = slack_col[r]
        else:
            id_col[r] = ncol
            art_cols.append(ncol)
            ncol += 1
    is_art = set(art_cols)

    rows = []
    for r, (ints, irhs) in enumerate(int_rows):
        row = ints + [0] * (ncol - nreal) + [irhs]
        if r in slack_col:
            row[slack_col[r]] = sigmas[r]
        if id_col[r] in is_art:
            row[id_col[r]] = 1
        rows.append(row)

    # phase 1: minimise the sum of artificials
    z = [0] * (ncol + 1)
    for r in range(m):
        if id_col[r] in is_art:
            for j in range(ncol + 1):
                if j not in is_art:
                    z[j] -= rows[r][j]
    rows.append(z)
    tab = _Tableau(rows, list(id_col))
    tab.run(range(ncol))
    rows = tab.rows
    if rows[m][-1] != 0:  # phase-1 optimum -z_rhs/D > 0
        y = []
        for r in range(m):
            c_id = 1 if id_col[r] in is_art else 0
            y.append(Fraction(c_id) - Fraction(rows[m][id_col[r]], tab.D))
        mu = [-sigmas[r] * scales[r] * y[r] for r in range(m)]
        return LPResult(INFEASIBLE, farkas=(tuple(mu[:n_eq]), tuple(mu[n_eq:])), pivots=tab.pivots)

    # drive zero-level artificials out of the basis where possible
    for r in range(m):
        if tab.basis[r] in is_art:
            s = next((j for j in range(ncol) if j not in is_art and tab.rows[r][j] != 0), None)
            if s is not None:
                tab.pivot(r, s)
    rows = tab.rows

    # phase 2
    cstd = [_ZERO] * ncol
    for j in range(n):
        p, q = colmap[j]
        cstd[p] = cmin[j]
        if q is not None:
            cstd[q] = -cmin[j]
    cs = 1
    for v in cstd:
        if v.denominator != 1:
            cs = lcm(cs, v.denominator)
    ci = [int(v * cs) for v in cstd]
    D = tab.D
    z = [ci[j] * D for j in range(ncol)] + [0]
    for r in range(m):
        cb = ci[tab.basis[r]]
        if cb:
            row = rows[r]
            z = [zj - cb * x for zj, x in zip(z, row)]
    rows[m] = z
    allowed = [j for j in range(ncol) if j not in is_art]
    unb = tab.run(allowed)
    rows = tab.rows
    D = tab.D

    zstd = [Fraction(0)] * ncol
    for r in range(m):
        zstd[tab.basis[r]] = Fraction(rows[r][-1], D)
    x = []
    for j in range(n):
        p, q = colmap[j]
        v = zstd[p] - (zstd[q] if q is not None else 0) + shift[j]
        x.append(v)
    x = tuple(x)

    if unb is not None:
        dstd = [Fraction(0)] * ncol
        dstd[unb] = Fraction(1)
        for r in range(m):
            dstd[tab.basis[r]] = -Fraction(rows[r][unb], D)
        ray = []
        for j in range(n):
            p, q = colmap[j]
            ray.append(dstd[p] - (dstd[q] if q is not None else 0))
        return LPResult(UNBOUNDED, x=x, ray=tuple(ray), pivots=tab.pivots)

    value = sum((c * v for c, v in zip(lp.objective, x)), _ZERO)
    y = [-Fraction(rows[m][id_col[r]], D * cs) for r in range(m)]
    lam = [sigmas[r] * scales[r] * y[r] for r in range(m)]
    return LPResult(
        OPTIMAL,
        value=value,
        x=x,
        eq_duals=tuple(lam[:n_eq]),
        ub_duals=tuple(lam[n_eq:]),
        pivots=tab.pivots,
    )


def _combo(lp, u, v):
    n = lp.n
    w = [_ZERO] * n
    for ui, row in zip(u, lp.eq_matrix):
        if ui:
            for j in range(n):
                w[j] += ui * row[j]
    for vi, row in zip(v, lp.ub_matrix):
        if vi:
            for j in range(n):
                w[j] += vi * row[j]
    return w


def verify_feasible(lp, x):
    """True iff ``x`` satisfies every constraint of ``lp`` exactly."""
    for row, rhs in zip(lp.eq_matrix, lp.eq_rhs):
        if sum((a * b for a, b in zip(row, x)), _ZERO) != rhs:
            return False
    for row, rhs in zip(lp.ub_matrix, lp.ub_rhs):
        if sum((a * b for a, b in zip(row, x)), _ZERO) > rhs:
            return False
    return all(l is None or xj >= l for xj, l in zip(x, lp.lower_bounds))


def verify_farkas(lp, certificate):
    """Check that ``(u, v)`` proves the constraint system of ``lp`` empty."""
    u, v = certificate
    if any(vi < 0 for vi in v):
        return False
    w = _combo(lp, u, v)
    for wj, l in zip(w, lp.lower_bounds):
        if l is None and wj != 0:
            return False
        if l is not None and wj < 0:
            return False
    lhs = sum((wj * l for wj, l in zip(w, lp.lower_bounds) if l is not None), _ZERO)
    rhs = sum((a * b for a, b in zip(u, lp.eq_rhs)), _ZERO) + sum((a * b for a, b in zip(v, lp.ub_rhs)), _ZERO)
    return lhs > rhs


def verify_dual(lp, result):
    """Check dual feasibility of the multipliers and zero duality gap."""
    sign = 1 if lp.sense == "min" else -1
    u, v = result.eq_duals, result.ub_duals
    if any(vi > 0 for vi in v):
        return False
    w = _combo(lp, u, v)
    dual_obj = sum((a * b for a, b in zip(u, lp.eq_rhs)), _ZERO) + sum((a * b for a, b in zip(v, lp.ub_rhs)), _ZERO)
    for j, l in enumerate(lp.lower_bounds):
        red = sign * lp.objective[j] - w[j]
        if l is None and red != 0:
            return False
        if l is not None:
            if red < 0:
                return False
            dual_obj += red * l
    return dual_obj == sign * result.value


def verify_ray(lp, result):
    d = result.ray
    if not verify_feasible(lp, result.x):
        return False
    for row in lp.eq_matrix:
        if sum((a * b for a, b in zip(row, d)), _ZERO) != 0:
            return False
    for row in lp.ub_matrix:
        if sum((a * b for a, b in zip(row, d)), _ZERO) > 0:
            return False
    if any(l is not None and dj < 0 for dj, l in zip(d, lp.lower_bounds)):
        return False
    gain = sum((a * b for a, b in zip(lp.objective, d)), _ZERO)
    return gain < 0 if lp.sense == "min" else gain > 0
