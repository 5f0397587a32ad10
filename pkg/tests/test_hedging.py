import random
from fractions import Fraction

import pytest

from colmkt.arbitrage import Layout, check_nca, collective_mm_polytope, max_t
from colmkt.errors import NcaViolated, NotReplicable
from colmkt.gains import gain_of_strategy
from colmkt.hedging import (
    classical_super_price,
    completeness,
    decomposition_check,
    dual_super_price,
    hedge_outcome,
    is_replicable,
    price_gap,
    replicate,
    sub_price,
    super_price,
    super_price_general,
)
from colmkt.market import (
    Agent,
    ExchangeSpace,
    Filtration,
    MarketModel,
    RandomVector,
    indicator_claim,
    zero_sum_generators_from_partition,
)
from colmkt.polytope import enumerate_vertices
from colmkt.random_markets import random_strategy

F = Fraction
A1, A3 = ["w1", "w2"], ["w5", "w6"]


def binomial():
    filt = Filtration(([(0, 1)], [(0,), (1,)]))
    prices = ((F(1), F(1)), (F(2), F(1, 2)))
    return MarketModel(("u", "d"), (F(1, 2), F(1, 2)), 1, ("S",), (prices,), (Agent("a", (0,), filt),))


def const(N, K, values):
    return RandomVector(tuple((F(v),) * K for v in values))


def test_super_price_examples(fig1, fig1_Y):
    rho, cert = super_price(fig1, RandomVector.zeros(2, 6), fig1_Y)
    assert rho == 0 and cert.transfer == (0, 0) and cert.slack.is_zero()
    assert super_price(fig1, const(2, 6, [F(3, 2), -4]), fig1_Y)[0] == F(-5, 2)
    f = indicator_claim(fig1, 0, A1)
    rho, cert = super_price(fig1, f, fig1_Y)
    assert rho == F(1, 4) and cert.transfer == (F(1, 8), F(1, 8))
    assert hedge_outcome(fig1, cert, fig1_Y) - f == cert.slack


def test_sub_price_examples(fig1, fig1_Y, nca_suite):
    assert sub_price(fig1, RandomVector.zeros(2, 6), fig1_Y)[0] == 0
    f = indicator_claim(fig1, 1, ["w3", "w4"])
    assert sub_price(fig1, f, fig1_Y)[0] == super_price(fig1, f, fig1_Y)[0]
    for model, Y, g in nca_suite[:60]:
        lo, cert = sub_price(model, g, Y, check=False)
        assert lo <= super_price(model, g, Y, check=False)[0]
        assert all(v <= 0 for c in cert.slack.components for v in c)


def test_dual_examples(fig1, fig1_Y):
    f = RandomVector((tuple(F(k) for k in range(6)), (F(0), F(1), F(2), F(3), F(4), F(5))))
    want = sum(q * v for q, v in zip((F(1, 8),) * 4 + (F(1, 6), F(1, 3)), f.components[0]))
    want += sum(q * v for q, v in zip((F(1, 8),) * 4 + (F(1, 3), F(1, 6)), f.components[1]))
    assert dual_super_price(fig1, f, fig1_Y) == want == super_price(fig1, f, fig1_Y)[0]
    assert dual_super_price(fig1, RandomVector.zeros(2, 6), fig1_Y) == 0


def test_classical_examples(fig1):
    assert classical_super_price(fig1, 0, (F(7, 3),) * 6) == F(7, 3)
    assert classical_super_price(fig1, 0, indicator_claim(fig1, 0, A3).components[0]) == F(1, 2)
    assert classical_super_price(fig1, 0, indicator_claim(fig1, 0, A1).components[0]) == F(1, 2)


def test_decomposition_examples(fig1, nca_suite):
    f = RandomVector((indicator_claim(fig1, 0, A1).components[0], indicator_claim(fig1, 1, ["w1"]).components[1]))
    rep = decomposition_check(fig1, f)
    assert rep["collective"] == F(5, 8) and rep["classical"] == (F(1, 2), F(1, 8))
    assert decomposition_check(fig1, RandomVector.zeros(2, 6))["collective"] == 0
    done = 0
    for model, _, g in nca_suite:
        if check_nca(model, ExchangeSpace()).holds:
            decomposition_check(model, g, check=False)
            done += 1
        if done == 100:
            break
    assert done == 100


def test_replicate_examples(fig1, fig1_Y, nca_suite):
    with pytest.raises(NotReplicable) as exc:
        replicate(fig1, RandomVector(((1, 0, 0, 0, 0, 0), (0,) * 6)), ExchangeSpace())
    assert any(exc.value.certificate)
    rng = random.Random(3)
    for model, Y, _ in nca_suite[:40]:
        N = model.n_agents
        k = RandomVector(tuple(gain_of_strategy(model, i, random_strategy(rng, model, i)) for i in range(N)))
        f = k
        for g in Y.generators:
            f = f + g.scale(F(rng.randint(-3, 3)))
        cert = replicate(model, f, Y)
        assert all(m == 0 for m in cert.transfer) and hedge_outcome(model, cert, Y) == f


def test_hedging_requires_nca(fig2):
    Y = zero_sum_generators_from_partition(fig2, 1)
    with pytest.raises(NcaViolated):
        super_price(fig2, RandomVector.zeros(2, 6), Y)


def test_rho_properties(nca_suite):
    rng = random.Random(21)
    for model, Y, f in nca_suite[:80]:
        N = model.n_agents
        rho, cert = super_price(model, f, Y, check=False)
        c = [F(rng.randint(-5, 5), rng.randint(1, 3)) for _ in range(N)]
        assert super_price(model, f.shift(c), Y, check=False)[0] == rho + sum(c)
        lam = F(rng.randint(0, 6), rng.randint(1, 3))
        assert super_price(model, f.scale(lam), Y, check=False)[0] == lam * rho
        bigger = RandomVector(tuple(tuple(v + 1 for v in comp) for comp in f.components))
        assert super_price(model, bigger, Y, check=False)[0] >= rho
        assert cert.transfer == (rho / N,) * N
        assert super_price_general(model, f, Y, check=False) == rho
        assert sub_price(model, f, Y, check=False)[0] <= rho


def test_replicable_generator_changes_nothing(nca_suite):
    rng = random.Random(31)
    for model, Y, f in nca_suite[:40]:
        N = model.n_agents
        m = [F(rng.randint(-3, 3)) for _ in range(N - 1)]
        m.append(-sum(m))
        k = RandomVector(tuple(gain_of_strategy(model, i, random_strategy(rng, model, i)) for i in range(N)))
        g = k.shift(m)
        for gen in Y.generators:
            g = g + gen.scale(F(rng.randint(-2, 2)))
        wider = Y.extend(g)
        assert check_nca(model, wider).holds
        assert super_price(model, f, wider, check=False)[0] == super_price(model, f, Y, check=False)[0]
        assert sub_price(model, f, wider, check=False)[0] == sub_price(model, f, Y, check=False)[0]


def test_adding_a_priced_claim_opens_the_interval(nca_suite):
    rng = random.Random(41)
    seen = 0
    for model, Y, g in nca_suite:
        if is_replicable(model, g, Y):
            continue
        lo, _ = sub_price(model, g, Y, check=False)
        hi, _ = super_price(model, g, Y, check=False)
        mid = lo + (hi - lo) * F(rng.randint(1, 9), 10)
        shift = [F(0)] * model.n_agents
        shift[0] = -mid
        f = g.shift(shift)
        wider = Y.extend(f)
        assert check_nca(model, wider).holds
        assert sub_price(model, f, Y, check=False)[0] < 0 < super_price(model, f, Y, check=False)[0]
        seen += 1
        if seen == 30:
            break
    assert seen > 0


def test_price_gap_examples(fig1, fig1_Y):
    gap = price_gap(fig1, indicator_claim(fig1, 0, A1), fig1_Y)
    assert gap.replicable and gap.lower == gap.upper == F(1, 4)
    gap = price_gap(fig1, RandomVector(((1, 0, 0, 0, 0, 0), (0,) * 6)), ExchangeSpace())
    assert not gap.replicable and gap.lower < gap.upper


def test_open_interval_at_full_support(nca_suite):
    checked = 0
    for model, Y, f in nca_suite:
        poly = collective_mm_polytope(model, Y)
        if poly.n > 10 or is_replicable(model, f, Y):
            continue
        lo, _ = sub_price(model, f, Y, check=False)
        hi, _ = super_price(model, f, Y, check=False)
        fb = Layout(model).stack(f.components)
        value = lambda x: sum(a * b for a, b in zip(x, fb))
        _, inner = max_t(poly)
        assert lo < value(inner) < hi
        for v in enumerate_vertices(poly):
            if value(v) in (lo, hi):
                assert not all(x > 0 for x in v)
                # full-support points approach the endpoint
                eps = F(1, 1000)
                near = [(1 - eps) * a + eps * b for a, b in zip(v, inner)]
                assert all(x > 0 for x in near) and lo < value(near) < hi
        checked += 1
    assert checked > 0


def test_completeness_examples(fig1, fig1_Y):
    assert completeness(fig1, fig1_Y).complete
    assert not completeness(fig1, ExchangeSpace()).complete
    model = binomial()
    rep = completeness(model, ExchangeSpace())
    assert rep.complete and rep.singleton and rep.indicators_replicable and rep.prices_agree
