"""Seeded random small markets for property checks and the audit command."""

import random
from fractions import Fraction

from .gains import AgentStrategy, strategy_keys
from .market import (
    Agent,
    ExchangeSchedule,
    ExchangeSpace,
    Filtration,
    MarketModel,
    RandomVector,
    common_partition,
    meet_partitions,
)


def _random_partition(rng, atoms, max_blocks=None):
    atoms = list(atoms)
    k = rng.randint(1, min(len(atoms), max_blocks or len(atoms)))
    labels = [rng.randrange(k) for _ in atoms]
    blocks = {}
    for a, lab in zip(atoms, labels):
        blocks.setdefault(lab, []).append(a)
    return list(blocks.values())


def _random_filtration(rng, K, T):
    parts = [[list(range(K))]]
    for t in range(1, T + 1):
        nxt = []
        for b in parts[-1]:
            nxt.extend(_random_partition(rng, b, 3))
        # keep the last partition reasonably fine so claims are interesting
        if t == T and rng.random() < 0.6:
            nxt = [[a] for a in range(K)]
        parts.append(nxt)
    return Filtration(tuple(parts))


def _shared(filts, t):
    part = filts[0].partitions[t]
    for f in filts[1:]:
        part = meet_partitions(part, f.partitions[t])
    return part


def _price_process(rng, K, T, filts):
    """Adapted to every filtration in ``filts``; often a martingale under a random measure."""
    parts = [_shared(filts, t) for t in range(T + 1)]
    terminal = {}
    for b in parts[T]:
        terminal[b] = Fraction(rng.randint(-4, 6))
    values = [[Fraction(0)] * K for _ in range(T + 1)]
    for b, v in terminal.items():
        for a in b:
            values[T][a] = v
    martingale = rng.random() < 0.75
    weights = [Fraction(rng.randint(1, 4)) for _ in range(K)]
    for t in range(T - 1, -1, -1):
        for B in parts[t]:
            if martingale:
                mass = sum(weights[a] for a in B)
                v = sum(weights[a] * values[T][a] for a in B) / mass
            else:
                v = Fraction(rng.randint(-3, 5))
            for a in B:
                values[t][a] = v
    return tuple(tuple(row) for row in values)


def random_market(rng, max_atoms=8, max_agents=3, max_horizon=2, max_generators=2, common_filtration=None):
    """Returns ``(model, Y)`` with a zero-sum exchange space of at most ``max_generators`` generators."""
    K = rng.randint(2, max_atoms)
    N = rng.randint(1, max_agents)
    T = rng.randint(1, max_horizon)
    weights = [rng.randint(1, 5) for _ in range(K)]
    total = sum(weights)
    prob = tuple(Fraction(w, total) for w in weights)
    common = rng.random() < 0.5 if common_filtration is None else common_filtration
    if common:
        f = _random_filtration(rng, K, T)
        filts = [f] * N
    else:
        filts = [_random_filtration(rng, K, T) for _ in range(N)]
    J = rng.randint(1, 3)
    access = [set() for _ in range(J)]
    for i in range(N):
        access[rng.randrange(J)].add(i)
    for j in range(J):
        if not access[j]:
            access[j].add(rng.randrange(N))
        if rng.random() < 0.25:
            access[j].add(rng.randrange(N))
    prices = tuple(_price_process(rng, K, T, [filts[i] for i in sorted(access[j])]) for j in range(J))
    agents = tuple(
        Agent(f"a{i + 1}", tuple(j for j in range(J) if i in access[j]), filts[i]) for i in range(N)
    )
    names = tuple(f"S{j + 1}" for j in range(J))
    model = MarketModel(tuple(f"w{k + 1}" for k in range(K)), prob, T, names, prices, agents)
    return model, random_exchanges(rng, model, max_generators)


def random_exchanges(rng, model, max_generators=2):
    N = model.n_agents
    if N == 1:
        return ExchangeSpace()
    gens = []
    for _ in range(rng.randint(0, max_generators)):
        # late exchanges see more information and are the interesting ones
        t = model.horizon if rng.random() < 0.6 else rng.randint(0, model.horizon)
        part = common_partition(model, t)
        comps = [[Fraction(0)] * model.n_atoms for _ in range(N)]
        for B in part:
            y = [rng.randint(-2, 2) for _ in range(N - 1)]
            y.append(-sum(y))
            for i in range(N):
                for a in B:
                    comps[i][a] = Fraction(y[i])
        gens.append(RandomVector(tuple(tuple(c) for c in comps)))
    return ExchangeSpace(tuple(gens))


def random_claim(rng, model, lo=-3, hi=3):
    comps = []
    for i in range(model.n_agents):
        row = [Fraction(0)] * model.n_atoms
        for B in model.terminal_blocks(i):
            v = Fraction(rng.randint(lo, hi))
            for a in B:
                row[a] = v
        comps.append(tuple(row))
    return RandomVector(tuple(comps))


def random_strategy(rng, model, i, lo=-2, hi=2):
    return AgentStrategy({k: Fraction(rng.randint(lo, hi)) for k in strategy_keys(model, i) if rng.random() < 0.7})


def random_schedule(rng, model, zero_sum=False):
    per_time = []
    N = model.n_agents
    for t in range(1, model.horizon + 1):
        comps = []
        for i in range(N):
            row = [Fraction(0)] * model.n_atoms
            for B in model.agents[i].filtration.partitions[t]:
                v = Fraction(rng.randint(-2, 2))
                for a in B:
                    row[a] = v
            comps.append(row)
        if zero_sum:
            part = common_partition(model, t)
            comps = [[Fraction(0)] * model.n_atoms for _ in range(N)]
            for B in part:
                y = [rng.randint(-2, 2) for _ in range(N - 1)]
                y.append(-sum(y))
                for i in range(N):
                    for a in B:
                        comps[i][a] = Fraction(y[i])
        per_time.append(RandomVector(tuple(tuple(c) for c in comps)))
    return ExchangeSchedule(tuple(per_time))


def random_suite(n, seed, **kw):
    """``n`` markets (with or without arbitrage), deterministic in ``seed``."""
    rng = random.Random(seed)
    return [random_market(rng, **kw) for _ in range(n)]


def random_nca_suite(n, seed, **kw):
    """``n`` markets satisfying NCA for their exchange space, by rejection."""
    from .arbitrage import check_nca

    rng = random.Random(seed)
    out = []
    while len(out) < n:
        model, Y = random_market(rng, **kw)
        if check_nca(model, Y).holds:
            out.append((model, Y))
    return out
