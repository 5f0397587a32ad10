"""Finite multi-agent market models.

Atoms are indexed ``0..K-1`` internally and carry string labels.  An
information partition is a tuple of blocks, each block a sorted tuple of atom
indices; blocks are ordered by their smallest atom.  The riskless asset is
implicit (constant 1) and never stored.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from .errors import (
    EventNotMeasurable,
    MarketError,
    MassNotOne,
    NoCommonPartition,
    NonAdaptedAsset,
    NonRefiningFiltration,
    NotMeasurable,
    UnknownAssetIndex,
    ZeroProbabilityAtom,
)


def parse_rational(value) -> Fraction:
    """Parse ``"p/q"``, ``"p"`` or an int. Floats are rejected."""
    if isinstance(value, bool) or isinstance(value, float):
        raise MarketError(f"rationals must be strings or integers, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            q = Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise MarketError(f"cannot parse rational {value!r}") from None
        if "." in value or "e" in value.lower():
            raise MarketError(f"decimal notation not allowed for rationals: {value!r}")
        return q
    raise MarketError(f"cannot parse rational {value!r}")


def fmt(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def canonical_partition(blocks) -> tuple:
    return tuple(sorted((tuple(sorted(b)) for b in blocks if b), key=lambda b: b[0]))


def refines(fine, coarse) -> bool:
    """Every block of ``fine`` lies inside a block of ``coarse``."""
    owner = {}
    for k, b in enumerate(coarse):
        for a in b:
            owner[a] = k
    return all(len({owner[a] for a in b}) == 1 for b in fine)


def join_partitions(p, q) -> tuple:
    """Coarsest common refinement."""
    out = []
    for a in p:
        sa = set(a)
        for b in q:
            inter = sa.intersection(b)
            if inter:
                out.append(tuple(inter))
    return canonical_partition(out)


def meet_partitions(p, q) -> tuple:
    """Finest common coarsening (connected components of overlapping blocks)."""
    parent = {}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for b in list(p) + list(q):
        for a in b:
            parent.setdefault(a, a)
    for b in list(p) + list(q):
        r0 = find(b[0])
        for a in b[1:]:
            ra = find(a)
            if ra != r0:
                parent[ra] = r0
    groups = {}
    for a in parent:
        groups.setdefault(find(a), []).append(a)
    return canonical_partition(groups.values())


@dataclass(frozen=True)
class Filtration:
    partitions: tuple  # indexed by t = 0..T

    def __post_init__(self):
        object.__setattr__(self, "partitions", tuple(canonical_partition(p) for p in self.partitions))

    @cached_property
    def _lookup(self):
        out = []
        for part in self.partitions:
            idx = {}
            for k, b in enumerate(part):
                for a in b:
                    idx[a] = k
            out.append(idx)
        return out

    def block_index(self, t, atom) -> int:
        return self._lookup[t][atom]

    def block_of(self, t, atom) -> tuple:
        return self.partitions[t][self._lookup[t][atom]]

    def is_measurable(self, t, values) -> bool:
        return all(len({values[a] for a in b}) == 1 for b in self.partitions[t])


@dataclass(frozen=True)
class Agent:
    name: str
    assets: tuple  # 0-based asset indices
    filtration: Filtration


@dataclass(frozen=True)
class RandomVector:
    """N per-agent random variables, ``components[i][atom]``."""

    components: tuple

    def __post_init__(self):
        object.__setattr__(
            self, "components", tuple(tuple(Fraction(v) for v in comp) for comp in self.components)
        )

    @classmethod
    def zeros(cls, n_agents, n_atoms):
        return cls(((Fraction(0),) * n_atoms,) * n_agents)

    def __add__(self, other):
        return RandomVector(
            tuple(tuple(a + b for a, b in zip(x, y)) for x, y in zip(self.components, other.components))
        )

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return RandomVector(tuple(tuple(-a for a in x) for x in self.components))

    def scale(self, c):
        c = Fraction(c)
        return RandomVector(tuple(tuple(c * a for a in x) for x in self.components))

    def shift(self, c):
        """Add the deterministic vector ``c`` (one constant per agent)."""
        return RandomVector(tuple(tuple(a + Fraction(ci) for a in x) for x, ci in zip(self.components, c)))

    def is_zero(self):
        return all(a == 0 for x in self.components for a in x)

    def __le__(self, other):
        return all(a <= b for x, y in zip(self.components, other.components) for a, b in zip(x, y))

    def __ge__(self, other):
        return other <= self

    @property
    def n_agents(self):
        return len(self.components)


@dataclass(frozen=True)
class ExchangeSpace:
    """span(generators) + R^N_0. The deterministic part is always included."""

    generators: tuple = ()
    include_deterministic: bool = field(default=True, init=False)

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))

    @classmethod
    def deterministic(cls):
        return cls(())

    def extend(self, *extra):
        return ExchangeSpace(self.generators + tuple(extra))


@dataclass(frozen=True)
class ExchangeSchedule:
    """Exchanges executed at t = 1..T (``per_time[t-1]``)."""

    per_time: tuple

    def __post_init__(self):
        object.__setattr__(self, "per_time", tuple(self.per_time))


@dataclass(frozen=True)
class ExchangeConfig:
    mode: str  # "generators" | "zero_sum_partition"
    generators: tuple = ()
    time: int = None
    zero_sum: bool = True


@dataclass(frozen=True)
class MarketModel:
    atoms: tuple
    prob: tuple
    horizon: int
    asset_names: tuple
    prices: tuple  # prices[j][t][atom]
    agents: tuple
    exchanges: ExchangeConfig = None
    # sub-interval models start from a non-trivial partition
    conditional: bool = False

    def __post_init__(self):
        object.__setattr__(self, "prob", tuple(Fraction(p) for p in self.prob))
        object.__setattr__(
            self, "prices", tuple(tuple(tuple(Fraction(v) for v in row) for row in asset) for asset in self.prices)
        )
        self._validate()

    @property
    def n_atoms(self):
        return len(self.atoms)

    @property
    def n_agents(self):
        return len(self.agents)

    @property
    def n_assets(self):
        return len(self.asset_names)

    @cached_property
    def atom_index(self):
        return {a: k for k, a in enumerate(self.atoms)}

    def atom(self, key) -> int:
        if isinstance(key, int):
            if not 0 <= key < self.n_atoms:
                raise MarketError(f"atom index {key} out of range")
            return key
        try:
            return self.atom_index[key]
        except KeyError:
            raise MarketError(f"unknown atom {key!r}") from None

    def terminal_blocks(self, i) -> tuple:
        return self.agents[i].filtration.partitions[self.horizon]

    def increment(self, j, t):
        """X^j_t - X^j_{t-1} per atom."""
        now, before = self.prices[j][t], self.prices[j][t - 1]
        return tuple(a - b for a, b in zip(now, before))

    def _validate(self):
        K = len(self.atoms)
        T = self.horizon
        if len(set(self.atoms)) != K or K == 0:
            raise MarketError("atom labels must be non-empty and unique")
        if T < 1:
            raise MarketError("horizon must be at least 1")
        if len(self.prob) != K:
            raise MarketError("probability vector length differs from the number of atoms")
        for a, p in zip(self.atoms, self.prob):
            if p <= 0:
                raise ZeroProbabilityAtom(a)
        total = sum(self.prob)
        if total != 1:
            raise MassNotOne(total)
        J = len(self.asset_names)
        if len(self.prices) != J:
            raise MarketError("price array count differs from the number of assets")
        for name, asset in zip(self.asset_names, self.prices):
            if len(asset) != T + 1 or any(len(row) != K for row in asset):
                raise MarketError(f"asset {name!r} needs T+1 price rows over all atoms")
        if not self.agents:
            raise MarketError("at least one agent is required")
        everything = set(range(K))
        used = set()
        for ag in self.agents:
            if not ag.assets:
                raise MarketError(f"agent {ag.name!r} has no assets")
            for j in ag.assets:
                if not 0 <= j < J:
                    raise UnknownAssetIndex(ag.name, j + 1)
            used.update(ag.assets)
            parts = ag.filtration.partitions
            if len(parts) != T + 1:
                raise MarketError(f"agent {ag.name!r} filtration needs T+1 partitions")
            for t, part in enumerate(parts):
                atoms = [a for b in part for a in b]
                if len(atoms) != K or set(atoms) != everything:
                    raise MarketError(f"agent {ag.name!r} partition at t={t} is not a partition of the atoms")
            if not self.conditional and len(parts[0]) != 1:
                raise MarketError(f"agent {ag.name!r} initial partition must be trivial")
            for t in range(1, T + 1):
                if not refines(parts[t], parts[t - 1]):
                    raise NonRefiningFiltration(ag.name, t)
            for j in ag.assets:
                for t in range(T + 1):
                    for b in parts[t]:
                        if len({self.prices[j][t][a] for a in b}) != 1:
                            raise NonAdaptedAsset(ag.name, self.asset_names[j], t, tuple(self.atoms[a] for a in b))
        if used != set(range(J)):
            raise MarketError("every asset must be accessible to at least one agent")


# ---------------------------------------------------------------- parsing


def _atom_map(model_atoms, mapping, what):
    if not isinstance(mapping, dict):
        raise MarketError(f"{what}: expected an object keyed by atom")
    missing = set(model_atoms) - set(mapping)
    extra = set(mapping) - set(model_atoms)
    if missing or extra:
        raise MarketError(f"{what}: atoms mismatch (missing {sorted(missing)}, unknown {sorted(extra)})")
    return tuple(parse_rational(mapping[a]) for a in model_atoms)


def _parse_rv(atoms, comps, n_agents, what):
    if not isinstance(comps, list) or len(comps) != n_agents:
        raise MarketError(f"{what}: expected one atom map per agent ({n_agents})")
    return RandomVector(tuple(_atom_map(atoms, c, what) for c in comps))


def market_from_dict(data) -> MarketModel:
    try:
        atoms = tuple(data["omega"])
        T = int(data["T"])
        prob_map = data["P"]
        assets = data["assets"]
        agents_raw = data["agents"]
    except (KeyError, TypeError) as exc:
        raise MarketError(f"market file missing key {exc}") from None
    index = {a: k for k, a in enumerate(atoms)}
    prob = _atom_map(atoms, prob_map, "P")
    names, prices = [], []
    for asset in assets:
        names.append(asset["name"])
        rows = asset["prices"]
        if len(rows) != T + 1:
            raise MarketError(f"asset {asset['name']!r}: prices array must have length T+1")
        prices.append(tuple(_atom_map(atoms, row, f"asset {asset['name']!r}") for row in rows))
    agents = []
    for ag in agents_raw:
        name = ag["name"]
        idx = []
        for j in ag["assets"]:
            if not isinstance(j, int) or not 1 <= j <= len(assets):
                raise UnknownAssetIndex(name, j)
            idx.append(j - 1)
        parts = []
        filt = ag["filtration"]
        if len(filt) != T + 1:
            raise MarketError(f"agent {name!r}: filtration array must have length T+1")
        for part in filt:
            blocks = []
            for b in part:
                try:
                    blocks.append(tuple(index[a] for a in b))
                except KeyError as exc:
                    raise MarketError(f"agent {name!r}: unknown atom {exc}") from None
            parts.append(blocks)
        agents.append(Agent(name, tuple(sorted(set(idx))), Filtration(tuple(parts))))
    conditional = bool(data.get("conditional", False))
    model = MarketModel(atoms, prob, T, tuple(names), tuple(prices), tuple(agents), None, conditional)
    ex = data.get("exchanges")
    if ex is not None:
        mode = ex.get("mode", "generators")
        zero_sum = bool(ex.get("zero_sum", True))
        if mode == "generators":
            gens = tuple(_parse_rv(atoms, g, len(agents), "exchange generator") for g in ex.get("generators", []))
            for g in gens:
                check_random_vector(model, g)
                if zero_sum:
                    _check_zero_sum(g)
            cfg = ExchangeConfig("generators", gens, None, zero_sum)
        elif mode == "zero_sum_partition":
            t = int(ex["time"])
            if not 0 <= t <= T:
                raise MarketError(f"exchange time {t} outside 0..{T}")
            cfg = ExchangeConfig("zero_sum_partition", (), t, True)
        else:
            raise MarketError(f"unknown exchange mode {mode!r}")
        model = MarketModel(atoms, prob, T, tuple(names), tuple(prices), tuple(agents), cfg, conditional)
    return model


def parse_market(text: str) -> MarketModel:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MarketError(f"invalid JSON: {exc}") from None
    return market_from_dict(data)


def load_market(path) -> MarketModel:
    with open(path, encoding="utf-8") as fh:
        return parse_market(fh.read())


def _rv_to_json(model, rv):
    return [{a: fmt(v) for a, v in zip(model.atoms, comp)} for comp in rv.components]


def market_to_dict(model: MarketModel) -> dict:
    atoms = model.atoms
    out = {
        "omega": list(atoms),
        "P": {a: fmt(p) for a, p in zip(atoms, model.prob)},
        "T": model.horizon,
        "assets": [
            {"name": name, "prices": [{a: fmt(v) for a, v in zip(atoms, row)} for row in asset]}
            for name, asset in zip(model.asset_names, model.prices)
        ],
        "agents": [
            {
                "name": ag.name,
                "assets": [j + 1 for j in ag.assets],
                "filtration": [[[atoms[a] for a in b] for b in part] for part in ag.filtration.partitions],
            }
            for ag in model.agents
        ],
    }
    if model.conditional:
        out["conditional"] = True
    cfg = model.exchanges
    if cfg is not None:
        if cfg.mode == "generators":
            out["exchanges"] = {
                "mode": "generators",
                "generators": [_rv_to_json(model, g) for g in cfg.generators],
            }
            if not cfg.zero_sum:
                out["exchanges"]["zero_sum"] = False
        else:
            out["exchanges"] = {"mode": cfg.mode, "time": cfg.time}
    return out


def serialize_market(model: MarketModel) -> str:
    return json.dumps(market_to_dict(model), indent=2)


def parse_random_vector(model, data) -> RandomVector:
    """Claim files: ``{"claim": [ {atom: "p/q"} per agent ]}`` or the bare list."""
    if isinstance(data, str):
        data = json.loads(data)
    if isinstance(data, dict):
        data = data.get("claim")
    rv = _parse_rv(model.atoms, data, model.n_agents, "claim")
    check_random_vector(model, rv)
    return rv


def random_vector_to_json(model, rv):
    return _rv_to_json(model, rv)


# ---------------------------------------------------------------- checks & builders


def check_random_vector(model, rv, t=None):
    """Component i must be measurable for agent i at time t (default T)."""
    t = model.horizon if t is None else t
    if rv.n_agents != model.n_agents:
        raise MarketError(f"random vector has {rv.n_agents} components, market has {model.n_agents} agents")
    for i, (ag, comp) in enumerate(zip(model.agents, rv.components)):
        if len(comp) != model.n_atoms:
            raise MarketError("random vector component has wrong length")
        if not ag.filtration.is_measurable(t, comp):
            raise NotMeasurable(f"component {i} ({ag.name}) is not measurable w.r.t. its time-{t} information")
    return rv


def _check_zero_sum(rv):
    for vals in zip(*rv.components):
        if sum(vals) != 0:
            raise MarketError("exchange generator is not zero-sum on every atom")


def make_exchange_space(model, generators=(), zero_sum=True) -> ExchangeSpace:
    """Validated exchange space; set ``zero_sum=False`` to allow Y outside Y_0."""
    gens = tuple(generators)
    for g in gens:
        check_random_vector(model, g)
        if zero_sum:
            _check_zero_sum(g)
    return ExchangeSpace(gens)


def event_indices(model, event) -> tuple:
    return tuple(sorted({model.atom(a) for a in event}))


def indicator_claim(model, agent: int, event) -> RandomVector:
    """1_A on component ``agent``, zero elsewhere; A must be F^agent_T-measurable."""
    A = set(event_indices(model, event))
    part = model.terminal_blocks(agent)
    for b in part:
        inside = len(A.intersection(b))
        if inside not in (0, len(b)):
            raise EventNotMeasurable(
                f"event {[model.atoms[a] for a in sorted(A)]} is not a union of agent {agent}'s terminal blocks"
            )
    comps = []
    for i in range(model.n_agents):
        if i == agent:
            comps.append(tuple(Fraction(int(a in A)) for a in range(model.n_atoms)))
        else:
            comps.append((Fraction(0),) * model.n_atoms)
    return RandomVector(tuple(comps))


def common_partition(model, t) -> tuple:
    """Finest partition whose blocks are time-t events for every agent."""
    if not 0 <= t <= model.horizon:
        raise NoCommonPartition(f"time {t} outside 0..{model.horizon}")
    part = model.agents[0].filtration.partitions[t]
    for ag in model.agents[1:]:
        part = meet_partitions(part, ag.filtration.partitions[t])
    return part


def zero_sum_generators_from_partition(model, t) -> ExchangeSpace:
    """Generators 1_{A_n}(e_i - e_N) spanning the zero-sum exchanges measurable at t."""
    part = common_partition(model, t)
    N, K = model.n_agents, model.n_atoms
    gens = []
    for block in part:
        ind = tuple(Fraction(int(a in block)) for a in range(K))
        neg = tuple(-v for v in ind)
        zero = (Fraction(0),) * K
        for i in range(N - 1):
            comps = [zero] * N
            comps[i] = ind
            comps[N - 1] = neg
            gens.append(RandomVector(tuple(comps)))
    return ExchangeSpace(tuple(gens))


def exchange_space(model) -> ExchangeSpace:
    """Resolve the market file's exchange configuration (R^N_0 when absent)."""
    cfg = model.exchanges
    if cfg is None:
        return ExchangeSpace.deterministic()
    if cfg.mode == "zero_sum_partition":
        return zero_sum_generators_from_partition(model, cfg.time)
    return ExchangeSpace(cfg.generators)


def deterministic_generators(N, K):
    """Basis e_i - e_N (i < N) of R^N_0 as constant random vectors."""
    gens = []
    for i in range(N - 1):
        comps = [(Fraction(0),) * K] * N
        comps[i] = (Fraction(1),) * K
        comps[N - 1] = (Fraction(-1),) * K
        gens.append(RandomVector(tuple(comps)))
    return gens


def restrict_horizon(model, s: int, t: int) -> MarketModel:
    """Sub-market on times s..t, re-indexed to 0..t-s.

    For s > 0 the initial partition is the agents' time-s information and the
    result is flagged ``conditional``.  A ``zero_sum_partition`` exchange time
    is re-based and must fall inside the window.
    """
    T = model.horizon
    if not 0 <= s < t <= T:
        raise MarketError(f"invalid horizon {s}:{t} for T={T}")
    prices = tuple(asset[s : t + 1] for asset in model.prices)
    agents = tuple(
        Agent(ag.name, ag.assets, Filtration(ag.filtration.partitions[s : t + 1])) for ag in model.agents
    )
    cfg = model.exchanges
    if cfg is not None and cfg.mode == "zero_sum_partition":
        if not s <= cfg.time <= t:
            raise MarketError(f"exchange time {cfg.time} lies outside the horizon {s}:{t}")
        cfg = ExchangeConfig(cfg.mode, (), cfg.time - s, True)
    elif cfg is not None and cfg.mode == "generators" and t < T:
        # generators are terminal-time objects; they must remain measurable
        for g in cfg.generators:
            for ag, comp in zip(agents, g.components):
                if not ag.filtration.is_measurable(t - s, comp):
                    raise MarketError("exchange generators are not measurable on the restricted horizon")
    conditional = model.conditional or s > 0
    return MarketModel(model.atoms, model.prob, t - s, model.asset_names, prices, agents, cfg, conditional)


def global_model(model) -> MarketModel:
    """Single synthetic agent trading every asset with the join of all filtrations."""
    T = model.horizon
    parts = []
    for t in range(T + 1):
        p = model.agents[0].filtration.partitions[t]
        for ag in model.agents[1:]:
            p = join_partitions(p, ag.filtration.partitions[t])
        parts.append(p)
    agent = Agent("global", tuple(range(model.n_assets)), Filtration(tuple(parts)))
    # join of trivial partitions is trivial, so `conditional` carries over unchanged
    return MarketModel(
        model.atoms, model.prob, T, model.asset_names, model.prices, (agent,), None, model.conditional
    )


def single_agent_model(model, i) -> MarketModel:
    """Agent i's own market (its assets only, renumbered)."""
    ag = model.agents[i]
    names = tuple(model.asset_names[j] for j in ag.assets)
    prices = tuple(model.prices[j] for j in ag.assets)
    new = Agent(ag.name, tuple(range(len(ag.assets))), ag.filtration)
    return MarketModel(model.atoms, model.prob, model.horizon, names, prices, (new,), None, model.conditional)
