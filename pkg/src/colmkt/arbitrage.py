"""Arbitrage checks and martingale measure polytopes.

Measures are parametrised by their mass on the blocks of each agent's
terminal partition; these are the only events an agent's claims and gains
can see.  When a terminal partition is discrete the block weights are the
atom weights.  Reported measures are spread over atoms in proportion to P.
"""

from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    ImplicationViolated,
    InternalInconsistency,
    MeasureNotCollectiveMartingale,
    NcaViolated,
)
from .gains import gains_basis, strategy_from_coefficients
from .linalg import independent_columns, left_nullspace, solve_linear_system
from .lp import INFEASIBLE, LinearProgram, solve_lp
from .market import (
    Agent,
    ExchangeSpace,
    MarketModel,
    RandomVector,
    check_random_vector,
    deterministic_generators,
    exchange_space,
    global_model,
)
from .polytope import Polytope, affine_dimension, enumerate_vertices

_ZERO = Fraction(0)


@dataclass(frozen=True)
class MeasureVector:
    per_agent: tuple  # per agent, one weight per atom

    def __post_init__(self):
        object.__setattr__(self, "per_agent", tuple(tuple(Fraction(v) for v in q) for q in self.per_agent))

    @property
    def equivalent(self):
        return all(v > 0 for q in self.per_agent for v in q)

    def expectation(self, i, values):
        return sum((q * v for q, v in zip(self.per_agent[i], values)), _ZERO)


@dataclass(frozen=True)
class ArbitrageWitness:
    strategies: tuple  # AgentStrategy per agent
    exchange_coefficients: tuple  # per generator of Y
    transfer: tuple  # deterministic zero-sum part
    outcome: RandomVector


@dataclass(frozen=True)
class NcaReport:
    holds: bool
    measure: MeasureVector = None
    witness: ArbitrageWitness = None
    t_star: Fraction = None


@dataclass(frozen=True)
class ImplicationsReport:
    na_global: bool
    nca: bool
    na_agents: tuple
    zero_sum: bool
    deterministic_only: bool


# ---------------------------------------------------------------- coordinates


class Layout:
    """Stacked (agent, terminal block) coordinates for a set of agents."""

    def __init__(self, model, agents=None):
        self.model = model
        self.agents = tuple(range(model.n_agents)) if agents is None else tuple(agents)
        self.cells = []
        self.offset = {}
        for i in self.agents:
            self.offset[i] = len(self.cells)
            for b in model.terminal_blocks(i):
                self.cells.append((i, b))
        self.size = len(self.cells)

    def blocks(self, i):
        return self.model.terminal_blocks(i)

    def stack(self, rv_components):
        """Block values of per-agent atom vectors (taken at a representative atom)."""
        return [rv_components[i][b[0]] for i, b in self.cells]

    def embed(self, i, values):
        out = [_ZERO] * self.size
        off = self.offset[i]
        for k, b in enumerate(self.blocks(i)):
            out[off + k] = values[b[0]]
        return out

    def unstack(self, vec):
        """Atom vectors per agent (all agents of the model; absent ones zero)."""
        K = self.model.n_atoms
        comps = [[_ZERO] * K for _ in range(self.model.n_agents)]
        for (i, b), v in zip(self.cells, vec):
            for a in b:
                comps[i][a] = v
        return RandomVector(tuple(tuple(c) for c in comps))

    def measure(self, vec):
        """Block masses to atom weights (proportional to P inside a block)."""
        P = self.model.prob
        K = self.model.n_atoms
        comps = [[_ZERO] * K for _ in range(self.model.n_agents)]
        for (i, b), v in zip(self.cells, vec):
            pb = sum(P[a] for a in b)
            for a in b:
                comps[i][a] = v * P[a] / pb
        return MeasureVector(tuple(tuple(c) for c in comps))

    def block_masses(self, measure):
        return [sum(measure.per_agent[i][a] for a in b) for i, b in self.cells]


def _martingale_rows(model, i, layout):
    rows = []
    ag = model.agents[i]
    off = layout.offset[i]
    blocks = layout.blocks(i)
    for t in range(1, model.horizon + 1):
        for B in ag.filtration.partitions[t - 1]:
            members = set(B)
            for j in ag.assets:
                inc = model.increment(j, t)
                row = [_ZERO] * layout.size
                for k, b in enumerate(blocks):
                    if b[0] in members:
                        row[off + k] = inc[b[0]]
                if any(row):
                    rows.append(row)
    return rows


def _mass_row(layout, i):
    row = [_ZERO] * layout.size
    off = layout.offset[i]
    for k in range(len(layout.blocks(i))):
        row[off + k] = Fraction(1)
    return row


def resolve_exchanges(model, Y=None) -> ExchangeSpace:
    Y = exchange_space(model) if Y is None else Y
    for g in Y.generators:
        check_random_vector(model, g)
    return Y


def is_zero_sum(Y) -> bool:
    return all(sum(vals) == 0 for g in Y.generators for vals in zip(*g.components))


def agent_mm_polytope(model, i) -> Polytope:
    """Martingale measures of agent i (closure of the equivalent ones)."""
    layout = Layout(model, [i])
    rows = [_mass_row(layout, i)] + _martingale_rows(model, i, layout)
    rhs = [Fraction(1)] + [_ZERO] * (len(rows) - 1)
    return Polytope(layout.size, rows, rhs)


def collective_mm_polytope(model, Y=None) -> Polytope:
    """Product of agent polytopes cut by sum_i E_{Q^i}[Y^i_m] = 0 for each generator."""
    Y = resolve_exchanges(model, Y)
    layout = Layout(model)
    rows, rhs = [], []
    for i in layout.agents:
        rows.append(_mass_row(layout, i))
        rhs.append(Fraction(1))
    for i in layout.agents:
        mrows = _martingale_rows(model, i, layout)
        rows += mrows
        rhs += [_ZERO] * len(mrows)
    for g in Y.generators:
        rows.append(layout.stack(g.components))
        rhs.append(_ZERO)
    return Polytope(layout.size, rows, rhs)


def max_t(poly: Polytope):
    """max t s.t. x in poly, x >= t.  Returns (t*, point) or (None, None) if empty."""
    n = poly.n
    eq = [list(row) + [sum(row)] for row in poly.eq_matrix]
    lp = LinearProgram(
        objective=[_ZERO] * n + [Fraction(1)],
        eq_matrix=eq,
        eq_rhs=poly.eq_rhs,
        sense="max",
        lower_bounds=[_ZERO] * (n + 1),
    )
    res = solve_lp(lp)
    if res.status == INFEASIBLE:
        return None, None
    if not res.optimal:
        raise InternalInconsistency("max-t program is unbounded on a bounded polytope")
    t = res.value
    return t, tuple(v + t for v in res.x[:n])


# ---------------------------------------------------------------- primal side


def _columns(model, Y, agents, with_deterministic=True):
    """Spanning columns of sum_i K_i (+ Y) in layout coordinates, with labels."""
    layout = Layout(model, agents)
    cols, labels = [], []
    for i in layout.agents:
        gb = gains_basis(model, i)
        for key, gen in zip(gb.keys, gb.generators):
            col = layout.embed(i, gen)
            if any(col):
                cols.append(col)
                labels.append(("gain", i, key))
    if Y is not None:
        if with_deterministic:
            for d, g in enumerate(deterministic_generators(model.n_agents, model.n_atoms)):
                cols.append(layout.stack(g.components))
                labels.append(("det", d))
        for m, g in enumerate(Y.generators):
            col = layout.stack(g.components)
            if any(col):
                cols.append(col)
                labels.append(("gen", m))
    return layout, cols, labels


def _as_matrix(cols, nrows):
    return [[c[r] for c in cols] for r in range(nrows)]


def _max_positive_outcome(layout, cols):
    """max sum of s over s in span(cols), 0 <= s <= 1 (weights = block sizes)."""
    R = layout.size
    if cols:
        W = left_nullspace(_as_matrix(cols, R))
    else:
        W = [[Fraction(int(r == c)) for c in range(R)] for r in range(R)]
    weights = [Fraction(len(b)) for _, b in layout.cells]
    lp = LinearProgram(
        objective=weights,
        eq_matrix=W,
        eq_rhs=[_ZERO] * len(W),
        ub_matrix=[[Fraction(int(r == c)) for c in range(R)] for r in range(R)],
        ub_rhs=[Fraction(1)] * R,
        sense="max",
        lower_bounds=[_ZERO] * R,
    )
    res = solve_lp(lp)
    if not res.optimal:
        raise InternalInconsistency(f"primal arbitrage program returned {res.status}")
    return res.value, res.x


def decompose(model, layout, cols, labels, target, n_generators):
    """Express ``target`` (layout coordinates) through the spanning columns."""
    keep = independent_columns(_as_matrix(cols, layout.size)) if cols else []
    sub = [cols[k] for k in keep]
    if sub:
        x, _ = solve_linear_system(_as_matrix(sub, layout.size), list(target))
    else:
        x = []
    holdings = {i: {} for i in range(model.n_agents)}
    gen = [_ZERO] * n_generators
    transfer = [_ZERO] * model.n_agents
    det = deterministic_generators(model.n_agents, 1)
    for k, c in zip(keep, x):
        lab = labels[k]
        if lab[0] == "gain":
            holdings[lab[1]][lab[2]] = c
        elif lab[0] == "gen":
            gen[lab[1]] += c
        else:
            for i, comp in enumerate(det[lab[1]].components):
                transfer[i] += c * comp[0]
    strategies = tuple(
        strategy_from_coefficients(list(holdings[i]), list(holdings[i].values())) for i in range(model.n_agents)
    )
    return strategies, tuple(gen), tuple(transfer)


def _verdict(model, poly, layout, cols, labels, Y, label):
    t, point = max_t(poly)
    dual_holds = t is not None and t > 0
    value, s = _max_positive_outcome(layout, cols)
    primal_holds = value == 0
    if dual_holds != primal_holds:
        raise InternalInconsistency(f"{label}: dual verdict {dual_holds} but primal optimum {value}")
    if dual_holds:
        return NcaReport(True, layout.measure(point), None, t)
    n_gen = len(Y.generators) if Y is not None else 0
    strategies, gen, transfer = decompose(model, layout, cols, labels, s, n_gen)
    outcome = layout.unstack(s)
    return NcaReport(False, None, ArbitrageWitness(strategies, gen, transfer, outcome), t if t is not None else _ZERO)


def check_na_agent(model, i) -> NcaReport:
    """No-arbitrage for agent i alone, by max-t over its measures and a primal LP."""
    poly = agent_mm_polytope(model, i)
    layout, cols, labels = _columns(model, None, [i])
    rep = _verdict(model, poly, layout, cols, labels, None, f"NA_{i}")
    if rep.holds:
        # keep only agent i's component
        return NcaReport(True, MeasureVector((rep.measure.per_agent[i],)), None, rep.t_star)
    return rep


def check_na_global(model) -> NcaReport:
    """NA for one agent who trades every asset and sees the join of all filtrations."""
    return check_na_agent(global_model(model), 0)


def check_nca(model, Y=None) -> NcaReport:
    """No collective arbitrage w.r.t. span(Y) + R^N_0; dual and primal must agree."""
    Y = resolve_exchanges(model, Y)
    poly = collective_mm_polytope(model, Y)
    layout, cols, labels = _columns(model, Y, None)
    return _verdict(model, poly, layout, cols, labels, Y, "NCA")


def implications_audit(model, Y=None) -> ImplicationsReport:
    Y = resolve_exchanges(model, Y)
    na = check_na_global(model).holds
    nca = check_nca(model, Y).holds
    na_i = tuple(check_na_agent(model, i).holds for i in range(model.n_agents))
    zs = is_zero_sum(Y)
    det_only = not Y.generators
    if zs and na and not nca:
        raise ImplicationViolated("NA holds but NCA(Y) fails for zero-sum Y")
    if nca and not all(na_i):
        raise ImplicationViolated("NCA(Y) holds but some NA_i fails")
    if det_only and all(na_i) and not nca:
        raise ImplicationViolated("NA_i for all i but NCA fails with deterministic exchanges only")
    return ImplicationsReport(na, nca, na_i, zs, det_only)


def is_singleton(model, Y=None) -> bool:
    Y = resolve_exchanges(model, Y)
    poly = collective_mm_polytope(model, Y)
    t, point = max_t(poly)
    if t is None or t <= 0:
        raise NcaViolated("no equivalent collective martingale measure exists")
    return affine_dimension(poly, point) == 0


def conditional_weights(model, measure: MeasureVector, i, s=0):
    """Q^i(atom) / Q^i(block of the time-s partition containing it)."""
    filt = model.agents[i].filtration
    q = measure.per_agent[i]
    out = []
    for a in range(model.n_atoms):
        mass = sum(q[b] for b in filt.block_of(s, a))
        out.append(q[a] / mass if mass else None)
    return tuple(out)


# ---------------------------------------------------------------- membership & extension


def measure_violations(model, Q: MeasureVector, Y=None):
    """Reasons ``Q`` is not an equivalent collective martingale measure (empty if it is)."""
    Y = resolve_exchanges(model, Y)
    problems = []
    if len(Q.per_agent) != model.n_agents:
        return ["wrong number of components"]
    for i, q in enumerate(Q.per_agent):
        if len(q) != model.n_atoms:
            return [f"component {i} has wrong length"]
        if any(v <= 0 for v in q):
            problems.append(f"component {i} is not equivalent to P")
        if sum(q) != 1:
            problems.append(f"component {i} does not sum to one")
    layout = Layout(model)
    x = layout.block_masses(Q)
    for i in range(model.n_agents):
        for row in _martingale_rows(model, i, layout):
            if sum(a * b for a, b in zip(row, x)) != 0:
                problems.append(f"component {i} is not a martingale measure for agent {i}")
                break
    for m, g in enumerate(Y.generators):
        if sum(Q.expectation(i, g.components[i]) for i in range(model.n_agents)) != 0:
            problems.append(f"polar condition fails for generator {m}")
    return problems


def extended_market(model, f: RandomVector, Q: MeasureVector, Y=None) -> MarketModel:
    """Add asset X^{J+i}_t = E_{Q^i}[f^i | F^i_t], tradable by agent i only."""
    check_random_vector(model, f)
    problems = measure_violations(model, Q, Y)
    if problems:
        raise MeasureNotCollectiveMartingale("; ".join(problems))
    J = model.n_assets
    names = list(model.asset_names)
    prices = list(model.prices)
    agents = []
    for i, ag in enumerate(model.agents):
        q, fi = Q.per_agent[i], f.components[i]
        rows = []
        for t in range(model.horizon + 1):
            row = [_ZERO] * model.n_atoms
            for B in ag.filtration.partitions[t]:
                mass = sum(q[a] for a in B)
                val = sum(q[a] * fi[a] for a in B) / mass
                for a in B:
                    row[a] = val
            rows.append(tuple(row))
        base = f"claim:{ag.name}"
        name = base
        while name in names:
            name += "'"
        names.append(name)
        prices.append(tuple(rows))
        agents.append(Agent(ag.name, ag.assets + (J + i,), ag.filtration))
    return MarketModel(
        model.atoms, model.prob, model.horizon, tuple(names), tuple(prices), tuple(agents),
        model.exchanges, model.conditional,
    )


# ---------------------------------------------------------------- price sets


@dataclass(frozen=True)
class PriceSet:
    closure_vertices: tuple  # extreme points of the closure, N-vectors
    sum_range: tuple  # (rho_minus, rho_plus)
    replicable: bool
    closed: bool = None  # a point when replicable; never closed otherwise
    full_support_vertices: tuple = ()  # flags, one per polytope vertex image


def _extreme_points(points):
    pts = sorted(set(points))
    if len(pts) <= 1:
        return pts
    out = []
    for k, p in enumerate(pts):
        others = pts[:k] + pts[k + 1 :]
        # is p a convex combination of the others?
        dim = len(p)
        eq = [[o[d] for o in others] for d in range(dim)] + [[Fraction(1)] * len(others)]
        lp = LinearProgram(
            objective=[_ZERO] * len(others),
            eq_matrix=eq,
            eq_rhs=list(p) + [Fraction(1)],
            lower_bounds=[_ZERO] * len(others),
        )
        if solve_lp(lp).status == INFEASIBLE:
            out.append(p)
    return out


def price_set(model, f: RandomVector, Y=None, max_vertex_dim=None) -> PriceSet:
    """Closure of the NCA price set of f, via vertices of the measure polytope."""
    from . import hedging

    Y = resolve_exchanges(model, Y)
    check_random_vector(model, f)
    rep = check_nca(model, Y)
    if not rep.holds:
        raise NcaViolated("price sets need NCA(Y)")
    lo, _ = hedging.sub_price(model, f, Y, check=False)
    hi, _ = hedging.super_price(model, f, Y, check=False)
    replicable = hedging.is_replicable(model, f, Y)
    poly = collective_mm_polytope(model, Y)
    layout = Layout(model)
    fb = layout.stack(f.components)
    verts = enumerate_vertices(poly, max_vertex_dim)
    images = []
    support = []
    for v in verts:
        images.append(
            tuple(
                sum((v[layout.offset[i] + k] * fb[layout.offset[i] + k] for k in range(len(layout.blocks(i)))), _ZERO)
                for i in range(model.n_agents)
            )
        )
        support.append(all(x > 0 for x in v))
    sums = [sum(p) for p in images]
    if images and (min(sums) != lo or max(sums) != hi):
        raise InternalInconsistency("vertex price sums disagree with the hedging prices")
    ext = _extreme_points(images)
    return PriceSet(tuple(ext), (lo, hi), replicable, replicable, tuple(support))
