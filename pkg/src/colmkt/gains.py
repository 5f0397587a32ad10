"""Attainable gains and collectively self-financing strategies.

Holdings are keyed by ``(t, block, j)`` where ``block`` is a block of the
agent's time ``t-1`` partition (a tuple of atom indices) and ``j`` an asset
index, so a strategy cannot depend on information it does not have.
"""

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import BlockKeyMismatch, CsfViolation, MarketError
from .market import RandomVector, check_random_vector

_ZERO = Fraction(0)


@dataclass(frozen=True)
class GainsBasis:
    agent: int
    keys: tuple  # (t, block, j)
    generators: tuple  # per key, one value per atom


@dataclass(frozen=True)
class AgentStrategy:
    holdings: dict = field(default_factory=dict)

    def get(self, t, block, j):
        return self.holdings.get((t, block, j), _ZERO)

    def scale(self, c):
        return AgentStrategy({k: c * v for k, v in self.holdings.items()})

    def __add__(self, other):
        out = dict(self.holdings)
        for k, v in other.holdings.items():
            out[k] = out.get(k, _ZERO) + v
        return AgentStrategy(out)


@dataclass(frozen=True)
class CsfStrategy:
    risky: tuple  # AgentStrategy per agent
    riskless: dict  # (i, t, block) -> h^i_t on that block of F^i_{t-1}
    v0: tuple


def strategy_keys(model, i):
    ag = model.agents[i]
    keys = []
    for t in range(1, model.horizon + 1):
        for block in ag.filtration.partitions[t - 1]:
            for j in ag.assets:
                keys.append((t, block, j))
    return keys


def gains_basis(model, i) -> GainsBasis:
    """Generators 1_B (X^j_t - X^j_{t-1}) spanning agent i's terminal gains."""
    keys = strategy_keys(model, i)
    gens = []
    for t, block, j in keys:
        inc = model.increment(j, t)
        members = set(block)
        gens.append(tuple(inc[a] if a in members else _ZERO for a in range(model.n_atoms)))
    return GainsBasis(i, tuple(keys), tuple(gens))


def _check_keys(model, i, H):
    ag = model.agents[i]
    for t, block, j in H.holdings:
        if not 1 <= t <= model.horizon:
            raise BlockKeyMismatch(f"holding at t={t} outside 1..{model.horizon}")
        if j not in ag.assets:
            raise BlockKeyMismatch(f"agent {ag.name!r} cannot trade asset index {j}")
        if block not in ag.filtration.partitions[t - 1]:
            raise BlockKeyMismatch(f"{list(block)} is not a block of agent {ag.name!r} at t={t - 1}")


def gain_process(model, i, H: AgentStrategy):
    """(H . X)_t per atom for t = 0..T."""
    _check_keys(model, i, H)
    filt = model.agents[i].filtration
    K = model.n_atoms
    out = [(_ZERO,) * K]
    for t in range(1, model.horizon + 1):
        prev = out[-1]
        row = []
        for a in range(K):
            block = filt.block_of(t - 1, a)
            g = prev[a]
            for j in model.agents[i].assets:
                h = H.holdings.get((t, block, j))
                if h:
                    g += h * (model.prices[j][t][a] - model.prices[j][t - 1][a])
            row.append(g)
        out.append(tuple(row))
    return out


def gain_of_strategy(model, i, H: AgentStrategy):
    return gain_process(model, i, H)[model.horizon]


def strategy_from_coefficients(keys, coeffs):
    return AgentStrategy({k: Fraction(c) for k, c in zip(keys, coeffs) if c})


# ---------------------------------------------------------------- exchanges over time


def check_schedule(model, schedule):
    if len(schedule.per_time) != model.horizon:
        raise MarketError(f"schedule needs {model.horizon} exchanges (t = 1..T)")
    for t, Y in enumerate(schedule.per_time, start=1):
        check_random_vector(model, Y, t)
    return schedule


def aggregate_exchanges(schedule) -> RandomVector:
    total = None
    for Y in schedule.per_time:
        total = Y if total is None else total + Y
    if total is None:
        raise MarketError("empty exchange schedule")
    return total


def cumulative_exchanges(schedule):
    """Y_{1:t} for t = 0..T; the t = 0 entry is zero."""
    first = schedule.per_time[0]
    acc = RandomVector.zeros(first.n_agents, len(first.components[0]))
    out = [acc]
    for Y in schedule.per_time:
        acc = acc + Y
        out.append(acc)
    return out


def _risky_value(model, i, H, t_hold, t_price, a):
    """H_{t_hold} . X_{t_price} at atom a."""
    filt = model.agents[i].filtration
    block = filt.block_of(t_hold - 1, a)
    return sum((H.get(t_hold, block, j) * model.prices[j][t_price][a] for j in model.agents[i].assets), _ZERO)


def lift_to_csf(model, v0, risky, schedule) -> CsfStrategy:
    """Complete risky holdings with riskless holdings so the strategy is c.s.f."""
    check_schedule(model, schedule)
    v0 = tuple(Fraction(v) for v in v0)
    if len(v0) != model.n_agents or len(risky) != model.n_agents:
        raise MarketError("need one initial wealth and one strategy per agent")
    riskless = {}
    for i, ag in enumerate(model.agents):
        H = risky[i]
        _check_keys(model, i, H)
        filt = ag.filtration
        for block in filt.partitions[0]:
            a = block[0]
            riskless[(i, 1, block)] = v0[i] - _risky_value(model, i, H, 1, 0, a)
        for t in range(1, model.horizon):
            Y = schedule.per_time[t - 1].components[i]
            for block in filt.partitions[t]:
                vals = set()
                for a in block:
                    h_t = riskless[(i, t, filt.block_of(t - 1, a))]
                    vals.add(h_t + _risky_value(model, i, H, t, t, a) + Y[a] - _risky_value(model, i, H, t + 1, t, a))
                if len(vals) != 1:
                    raise CsfViolation(t, tuple(model.atoms[a] for a in block), i)
                riskless[(i, t + 1, block)] = vals.pop()
    return CsfStrategy(tuple(risky), riskless, v0)


def _hat_value(model, csf, i, t_hold, t_price, a):
    block = model.agents[i].filtration.block_of(t_hold - 1, a)
    return csf.riskless[(i, t_hold, block)] + _risky_value(model, i, csf.risky[i], t_hold, t_price, a)


def value_process(model, csf: CsfStrategy, schedule):
    """V[i][t][atom] from the definition; raises CsfViolation if not c.s.f."""
    check_schedule(model, schedule)
    T, K = model.horizon, model.n_atoms
    out = []
    for i, ag in enumerate(model.agents):
        filt = ag.filtration
        rows = []
        v_0 = tuple(_hat_value(model, csf, i, 1, 0, a) for a in range(K))
        for a in range(K):
            if v_0[a] != csf.v0[i]:
                raise CsfViolation(0, filt.block_of(0, a), i)
        rows.append(v_0)
        for t in range(1, T + 1):
            Y = schedule.per_time[t - 1].components[i]
            rows.append(tuple(_hat_value(model, csf, i, t, t, a) + Y[a] for a in range(K)))
            if t < T:
                for a in range(K):
                    if _hat_value(model, csf, i, t + 1, t, a) != rows[t][a]:
                        raise CsfViolation(t, tuple(model.atoms[b] for b in filt.block_of(t, a)), i)
        out.append(tuple(rows))
    return tuple(out)


def value_decomposition(model, v0, risky, schedule):
    """v0 + (H . X)_t + Y_{1:t}, same layout as :func:`value_process`."""
    cum = cumulative_exchanges(schedule)
    out = []
    for i in range(model.n_agents):
        gp = gain_process(model, i, risky[i])
        out.append(
            tuple(
                tuple(Fraction(v0[i]) + g + y for g, y in zip(gp[t], cum[t].components[i]))
                for t in range(model.horizon + 1)
            )
        )
    return tuple(out)
