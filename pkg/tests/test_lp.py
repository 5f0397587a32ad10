from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from colmkt.errors import DimensionMismatch
from colmkt.lp import (
    INFEASIBLE,
    OPTIMAL,
    UNBOUNDED,
    LinearProgram,
    solve_lp,
    verify_dual,
    verify_farkas,
    verify_feasible,
    verify_ray,
)

F = Fraction


def test_lower_bound_only():
    res = solve_lp(LinearProgram(objective=[1], lower_bounds=[3]))
    assert res.status == OPTIMAL and res.value == 3 and res.x == (3,)


def test_simplex_max():
    lp = LinearProgram(objective=[1, 1], eq_matrix=[[1, 1]], eq_rhs=[1], sense="max", lower_bounds=[0, 0])
    res = solve_lp(lp)
    assert res.status == OPTIMAL and res.value == 1


def test_infeasible_has_certificate():
    lp = LinearProgram(objective=[0], ub_matrix=[[1]], ub_rhs=[-1], lower_bounds=[0])
    res = solve_lp(lp)
    assert res.status == INFEASIBLE and verify_farkas(lp, res.farkas)


def test_unbounded_has_ray():
    lp = LinearProgram(objective=[-1, 0], ub_matrix=[[-1, 1]], ub_rhs=[2], lower_bounds=[0, 0])
    res = solve_lp(lp)
    assert res.status == UNBOUNDED and verify_ray(lp, res)


def test_free_variables():
    # min |x - 1/3| written with a free x and an epigraph variable
    lp = LinearProgram(
        objective=[0, 1],
        ub_matrix=[[1, -1], [-1, -1]],
        ub_rhs=[F(1, 3), F(-1, 3)],
    )
    res = solve_lp(lp)
    assert res.value == 0 and res.x[0] == F(1, 3)


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        LinearProgram(objective=[1, 2], eq_matrix=[[1]], eq_rhs=[1])


def test_degenerate_cycling_example():
    # Beale's example cycles under the textbook rule; Bland's rule terminates
    lp = LinearProgram(
        objective=[F(-3, 4), 150, F(-1, 50), 6],
        ub_matrix=[[F(1, 4), -60, F(-1, 25), 9], [F(1, 2), -90, F(-1, 50), 3], [0, 0, 1, 0]],
        ub_rhs=[0, 0, 1],
        lower_bounds=[0, 0, 0, 0],
    )
    res = solve_lp(lp)
    assert res.status == OPTIMAL and res.value == F(-1, 20) and verify_dual(lp, res)


small = st.fractions(min_value=-4, max_value=4, max_denominator=3)


@st.composite
def programs(draw):
    n = draw(st.integers(1, 4))
    me = draw(st.integers(0, 2))
    mu = draw(st.integers(0, 3))
    row = st.lists(small, min_size=n, max_size=n)
    lb = draw(st.lists(st.one_of(st.none(), st.just(F(0)), small), min_size=n, max_size=n))
    return LinearProgram(
        objective=draw(row),
        eq_matrix=draw(st.lists(row, min_size=me, max_size=me)),
        eq_rhs=draw(st.lists(small, min_size=me, max_size=me)),
        ub_matrix=draw(st.lists(row, min_size=mu, max_size=mu)),
        ub_rhs=draw(st.lists(small, min_size=mu, max_size=mu)),
        sense=draw(st.sampled_from(["min", "max"])),
        lower_bounds=lb,
    )


@settings(max_examples=150, deadline=None)
@given(programs())
def test_results_carry_valid_certificates(lp):
    res = solve_lp(lp)
    if res.status == OPTIMAL:
        assert verify_feasible(lp, res.x)
        assert sum(a * b for a, b in zip(lp.objective, res.x)) == res.value
        assert verify_dual(lp, res)
    elif res.status == INFEASIBLE:
        assert verify_farkas(lp, res.farkas)
    else:
        assert verify_ray(lp, res)
    assert solve_lp(lp) == res


@settings(max_examples=60, deadline=None)
@given(programs())
def test_agrees_with_floating_solver(lp):
    scipy_opt = pytest.importorskip("scipy.optimize")
    res = solve_lp(lp)
    c = [float(v) * (1 if lp.sense == "min" else -1) for v in lp.objective]
    out = scipy_opt.linprog(
        c,
        A_ub=[[float(v) for v in r] for r in lp.ub_matrix] or None,
        b_ub=[float(v) for v in lp.ub_rhs] or None,
        A_eq=[[float(v) for v in r] for r in lp.eq_matrix] or None,
        b_eq=[float(v) for v in lp.eq_rhs] or None,
        bounds=[(None if l is None else float(l), None) for l in lp.lower_bounds],
        method="highs",
    )
    if out.status == 0:
        assert res.status == OPTIMAL
        assert abs(float(res.value) - (out.fun if lp.sense == "min" else -out.fun)) < 1e-6
    elif res.status == OPTIMAL:
        # the floating solver may misclassify; our answer is certified exactly
        assert verify_feasible(lp, res.x) and verify_dual(lp, res)
