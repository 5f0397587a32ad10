import random
from fractions import Fraction

import pytest

from colmkt.arbitrage import (
    Layout,
    MeasureVector,
    agent_mm_polytope,
    check_na_agent,
    check_na_global,
    check_nca,
    collective_mm_polytope,
    conditional_weights,
    extended_market,
    implications_audit,
    is_singleton,
    max_t,
    measure_violations,
    price_set,
)
from colmkt.errors import MeasureNotCollectiveMartingale, NcaViolated
from colmkt.gains import gain_of_strategy
from colmkt.market import (
    Agent,
    ExchangeSpace,
    Filtration,
    MarketModel,
    RandomVector,
    indicator_claim,
    restrict_horizon,
    single_agent_model,
    zero_sum_generators_from_partition,
)
from colmkt.polytope import enumerate_vertices
from colmkt.random_markets import random_market

F = Fraction
Q1 = (F(1, 8), F(1, 8), F(1, 8), F(1, 8), F(1, 6), F(1, 3))
Q2 = (F(1, 8), F(1, 8), F(1, 8), F(1, 8), F(1, 3), F(1, 6))


def one_period(up, down, p_up=F(1, 2)):
    filt = Filtration(([(0, 1)], [(0,), (1,)]))
    prices = ((F(1), F(1)), (F(up), F(down)))
    return MarketModel(("u", "d"), (p_up, 1 - p_up), 1, ("S",), (prices,), (Agent("a", (0,), filt),))


def test_binomial_unique_measure():
    model = one_period(2, F(1, 2))
    rep = check_na_agent(model, 0)
    assert rep.holds and rep.measure.per_agent == ((F(1, 3), F(2, 3)),)
    assert is_singleton(model, ExchangeSpace())


def test_monotone_price_arbitrage():
    model = one_period(2, 1)
    rep = check_na_agent(model, 0)
    assert not rep.holds
    H = rep.witness.strategies[0]
    assert H.holdings[(1, (0, 1), 0)] > 0
    assert gain_of_strategy(model, 0, H) == rep.witness.outcome.components[0]


def test_fig1_agent_measures(fig1):
    rep = check_na_agent(fig1, 0)
    assert rep.holds and agent_mm_polytope(fig1, 0).contains(Q1)
    assert not check_na_global(fig1).holds
    assert not is_singleton(fig1, ExchangeSpace())


def test_fig2_conditional_weights(fig2):
    late = restrict_horizon(fig2, 1, 2)
    for i in range(2):
        rep = check_na_agent(late, i)
        assert rep.holds
        both = MeasureVector((rep.measure.per_agent[0],) * 2)
        assert conditional_weights(late, both, i) == (F(1, 2),) * 6


def test_fig2_global_arbitrage_first_period(fig2):
    rep = check_na_global(restrict_horizon(fig2, 0, 1))
    assert not rep.holds
    out = rep.witness.outcome.components[0]
    assert out[0] > 0 and all(v == out[0] * w for v, w in zip(out, (1, 1, 0, 0, 0, 0)))
    H = rep.witness.strategies[0].holdings
    assert set(H.values()) == {out[0] / 2}


def test_single_agent_global_agrees(raw_suite):
    for model, _ in raw_suite[:60]:
        for i in range(model.n_agents):
            solo = single_agent_model(model, i)
            assert check_na_global(solo).holds == check_na_agent(solo, 0).holds == check_na_agent(model, i).holds


def test_collective_polytope_examples(fig1, fig1_Y, fig2):
    assert enumerate_vertices(collective_mm_polytope(fig1, fig1_Y)) == [Q1 + Q2]
    prod = collective_mm_polytope(fig1, ExchangeSpace())
    v1 = enumerate_vertices(agent_mm_polytope(fig1, 0))
    v2 = enumerate_vertices(agent_mm_polytope(fig1, 1))
    assert enumerate_vertices(prod) == sorted(a + b for a in v1 for b in v2)
    t, _ = max_t(collective_mm_polytope(fig2, zero_sum_generators_from_partition(fig2, 1)))
    assert t == 0


def test_nca_examples(fig1, fig1_Y, fig2):
    assert check_nca(restrict_horizon(fig2, 0, 1), ExchangeSpace()).holds
    rep = check_nca(fig2, zero_sum_generators_from_partition(fig2, 1))
    assert not rep.holds and rep.witness.outcome.components[0][0] > 0
    ok = check_nca(fig1, fig1_Y)
    assert ok.holds and ok.measure.per_agent == (Q1, Q2)


def test_witness_reassembles(raw_suite):
    for model, Y in raw_suite[:80]:
        rep = check_nca(model, Y)
        if rep.holds:
            assert not measure_violations(model, rep.measure, Y)
            continue
        w = rep.witness
        total = RandomVector(tuple(gain_of_strategy(model, i, w.strategies[i]) for i in range(model.n_agents)))
        for m, c in enumerate(w.exchange_coefficients):
            total = total + Y.generators[m].scale(c)
        total = total.shift(w.transfer)
        assert total == w.outcome and sum(w.transfer) == 0
        assert all(v >= 0 for comp in total.components for v in comp) and not total.is_zero()


def test_implications_fig1(fig1, fig1_Y):
    rep = implications_audit(fig1, fig1_Y)
    assert (rep.na_global, rep.nca, rep.na_agents) == (False, True, (True, True))


def test_deterministic_exchanges_reduce_to_agents(raw_suite):
    for model, _ in raw_suite:
        assert check_nca(model, ExchangeSpace()).holds == all(
            check_na_agent(model, i).holds for i in range(model.n_agents)
        )


def test_global_na_implies_nca_for_zero_sum(raw_suite):
    for model, Y in raw_suite:
        if check_na_global(model).holds:
            assert check_nca(model, Y).holds


def test_common_filtration_full_exchange_matches_global():
    rng = random.Random(12)
    seen = set()
    for _ in range(80):
        model, _ = random_market(rng, common_filtration=True)
        Y = zero_sum_generators_from_partition(model, model.horizon)
        verdict = check_nca(model, Y).holds
        assert verdict == check_na_global(model).holds
        seen.add(verdict)
    assert seen == {True, False}


def test_vertices_satisfy_polar_and_martingale(nca_suite):
    for model, Y, _ in nca_suite[:60]:
        poly = collective_mm_polytope(model, Y)
        if poly.n > 12:
            continue
        lay = Layout(model)
        for v in enumerate_vertices(poly):
            assert poly.contains(v)
            Q = lay.measure(v)
            for g in Y.generators:
                assert sum(Q.expectation(i, g.components[i]) for i in range(model.n_agents)) == 0
            # martingale property per agent, asset and predictable block
            for i, ag in enumerate(model.agents):
                for t in range(1, model.horizon + 1):
                    for B in ag.filtration.partitions[t - 1]:
                        for j in ag.assets:
                            inc = model.increment(j, t)
                            assert sum(Q.per_agent[i][a] * inc[a] for a in B) == 0


def test_price_set_fig1(fig1, fig1_Y):
    f = indicator_claim(fig1, 0, ["w1", "w2"])
    ps = price_set(fig1, f, fig1_Y)
    assert ps.closure_vertices == ((F(1, 4), F(0)),) and ps.sum_range == (F(1, 4), F(1, 4))
    zero = price_set(fig1, RandomVector.zeros(2, 6), fig1_Y)
    assert zero.closure_vertices == ((0, 0),)


def test_price_set_needs_nca(fig2):
    with pytest.raises(NcaViolated):
        price_set(fig2, RandomVector.zeros(2, 6), zero_sum_generators_from_partition(fig2, 1))


def test_price_set_sums_within_range(nca_suite):
    checked = 0
    for model, Y, f in nca_suite[:80]:
        if collective_mm_polytope(model, Y).n > 12:
            continue
        ps = price_set(model, f, Y)
        lo, hi = ps.sum_range
        assert all(lo <= sum(p) <= hi for p in ps.closure_vertices)
        if not ps.replicable:
            assert lo < hi
            checked += 1
    assert checked > 0


def test_extended_market_examples(fig1, fig1_Y):
    Q = MeasureVector((Q1, Q2))
    f = indicator_claim(fig1, 0, ["w1", "w2"])
    ext = extended_market(fig1, f, Q, fig1_Y)
    assert ext.prices[2][0][0] == F(1, 4)
    assert check_nca(ext, fig1_Y).holds
    const = RandomVector(((F(3),) * 6, (F(-2),) * 6))
    ext2 = extended_market(fig1, const, Q, fig1_Y)
    assert all(v == 3 for row in ext2.prices[2] for v in row)
    assert all(v == -2 for row in ext2.prices[3] for v in row)
    with pytest.raises(MeasureNotCollectiveMartingale):
        extended_market(fig1, f, MeasureVector(((F(1, 6),) * 6,) * 2), fig1_Y)


def test_extended_market_round_trip(nca_suite):
    for model, Y, f in nca_suite[:40]:
        poly = collective_mm_polytope(model, Y)
        _, point = max_t(poly)
        Q = Layout(model).measure(point)
        ext = extended_market(model, f, Q, Y)
        assert check_nca(ext, Y).holds
        for i, ag in enumerate(ext.agents):
            j = model.n_assets + i
            for t in range(1, model.horizon + 1):
                for B in ag.filtration.partitions[t - 1]:
                    mass = sum(Q.per_agent[i][a] for a in B)
                    avg = sum(Q.per_agent[i][a] * ext.prices[j][t][a] for a in B) / mass
                    assert avg == ext.prices[j][t - 1][B[0]]
