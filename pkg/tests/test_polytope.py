import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from colmkt.arbitrage import agent_mm_polytope, collective_mm_polytope
from colmkt.errors import DimensionLimitExceeded, PointNotStrictlyInterior
from colmkt.polytope import Polytope, affine_dimension, enumerate_vertices, max_vertex_dim

F = Fraction
SIMPLEX3 = Polytope(3, [[1, 1, 1]], [1])


def test_simplex_vertices():
    assert enumerate_vertices(SIMPLEX3) == [(0, 0, 1), (0, 1, 0), (1, 0, 0)]


def test_single_point():
    poly = Polytope(2, [[1, 0], [0, 1]], [F(1, 3), F(2, 3)])
    assert enumerate_vertices(poly) == [(F(1, 3), F(2, 3))]


def test_empty():
    assert enumerate_vertices(Polytope(1, [[1]], [-1])) == []


def test_agent_family_endpoints(fig1):
    verts = enumerate_vertices(agent_mm_polytope(fig1, 0))
    assert verts == [
        (0, 0, F(1, 4), F(1, 4), F(1, 6), F(1, 3)),
        (F(1, 4), F(1, 4), 0, 0, F(1, 6), F(1, 3)),
    ]


def test_affine_dimension_examples(fig1, fig1_Y):
    assert affine_dimension(SIMPLEX3, (F(1, 3),) * 3) == 2
    p = F(1, 4)
    point = (F(1, 2) * (F(1, 2) - p),) * 2 + (p / 2,) * 2 + (F(1, 6), F(1, 3))
    assert affine_dimension(agent_mm_polytope(fig1, 0), point) == 1
    poly = collective_mm_polytope(fig1, fig1_Y)
    assert affine_dimension(poly, enumerate_vertices(poly)[0]) == 0


def test_boundary_point_rejected():
    with pytest.raises(PointNotStrictlyInterior):
        affine_dimension(SIMPLEX3, (1, 0, 0))


def test_dimension_guard(monkeypatch):
    big = Polytope(30, [[1] * 30], [1])
    with pytest.raises(DimensionLimitExceeded):
        enumerate_vertices(big)
    assert len(enumerate_vertices(big, limit=30)) == 30
    monkeypatch.setenv("COLMKT_MAX_VERTEX_DIM", "2")
    assert max_vertex_dim() == 2
    with pytest.raises(DimensionLimitExceeded):
        enumerate_vertices(SIMPLEX3)


def test_vertices_match_lp_optima(raw_suite):
    rng = random.Random(100)
    polys = [collective_mm_polytope(m, Y) for m, Y in raw_suite[:40]]
    polys = [p for p in polys if p.n <= 12 and p.vertices]
    checked = 0
    for _ in range(100):
        poly = rng.choice(polys)
        c = [F(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(poly.n)]
        best = max(sum(a * b for a, b in zip(c, v)) for v in poly.vertices)
        res = poly.optimize(c, "max")
        assert res.optimal and res.value == best
        checked += 1
    assert checked == 100


@st.composite
def boxes(draw):
    n = draw(st.integers(1, 4))
    rows = draw(st.lists(st.lists(st.integers(-3, 3), min_size=n, max_size=n), min_size=0, max_size=3))
    rhs = draw(st.lists(st.integers(0, 5), min_size=len(rows), max_size=len(rows)))
    # add an upper box so the polytope is bounded
    rows = rows + [[int(i == k) for i in range(n)] for k in range(n)]
    rhs = rhs + [draw(st.integers(0, 3)) for _ in range(n)]
    return Polytope(n, ub_matrix=rows, ub_rhs=rhs)


@settings(max_examples=60, deadline=None)
@given(boxes())
def test_vertices_are_feasible_basic_points(poly):
    verts = enumerate_vertices(poly)
    assert verts == sorted(set(verts))
    for v in verts:
        assert poly.contains(v)
    # origin is feasible, so the polytope is nonempty and has a vertex
    assert verts
