"""Collective super/sub-hedging, replication and completeness."""

from dataclasses import dataclass
from fractions import Fraction

from .arbitrage import (
    Layout,
    _as_matrix,
    _columns,
    agent_mm_polytope,
    check_na_agent,
    check_nca,
    collective_mm_polytope,
    decompose,
    is_singleton,
    max_t,
    resolve_exchanges,
)
from .errors import (
    DecompositionViolated,
    EquivalenceViolated,
    IffViolated,
    InconsistentSystem,
    InternalInconsistency,
    NaViolated,
    NcaViolated,
    NotReplicable,
    NotMeasurable,
)
from .gains import gain_of_strategy
from .linalg import independent_columns, solve_linear_system
from .lp import LinearProgram, solve_lp
from .market import ExchangeSpace, RandomVector, check_random_vector, indicator_claim

_ZERO = Fraction(0)


@dataclass(frozen=True)
class HedgeCertificate:
    transfer: tuple  # m, one amount per agent
    strategies: tuple  # AgentStrategy per agent
    exchange: tuple  # coefficient per generator of Y
    deterministic: tuple  # zero-sum deterministic exchange
    slack: RandomVector  # m + k + Y - f


@dataclass(frozen=True)
class PriceGap:
    lower: Fraction
    upper: Fraction
    replicable: bool


@dataclass(frozen=True)
class CompletenessReport:
    complete: bool
    singleton: bool
    indicators_replicable: bool
    prices_agree: bool


def _require_nca(model, Y, check):
    if check and not check_nca(model, Y).holds:
        raise NcaViolated("collective arbitrage present; hedging prices are not finite")


def hedge_outcome(model, cert: HedgeCertificate, Y):
    """m + k + Y realised by a certificate, per agent and atom."""
    comps = []
    for i in range(model.n_agents):
        k = gain_of_strategy(model, i, cert.strategies[i])
        row = []
        for a in range(model.n_atoms):
            y = sum((c * g.components[i][a] for c, g in zip(cert.exchange, Y.generators)), _ZERO)
            row.append(cert.transfer[i] + cert.deterministic[i] + k[a] + y)
        comps.append(tuple(row))
    return RandomVector(tuple(comps))


def _certificate(model, Y, layout, cols, labels, combo, transfer, f):
    strategies, gen, det = decompose(model, layout, cols, labels, combo, len(Y.generators))
    cert = HedgeCertificate(tuple(transfer), strategies, gen, det, RandomVector.zeros(model.n_agents, model.n_atoms))
    slack = hedge_outcome(model, cert, Y) - f
    return HedgeCertificate(cert.transfer, strategies, gen, det, slack)


def super_price(model, f: RandomVector, Y=None, check=True):
    """rho_+(f) = min sum m s.t. m + k + Y >= f, in the normal form m = a 1.

    The deterministic zero-sum exchanges are part of Y, so any m can be
    moved to equal shares; the program is min N a over (a, c) with
    a + (G c) >= f, G spanning sum_i K_i + Y.
    """
    Y = resolve_exchanges(model, Y)
    check_random_vector(model, f)
    _require_nca(model, Y, check)
    N = model.n_agents
    layout, cols, labels = _columns(model, Y, None)
    keep = independent_columns(_as_matrix(cols, layout.size)) if cols else []
    sub = [cols[k] for k in keep]
    fb = layout.stack(f.components)
    R = layout.size
    # variables: a (free), c (free); rows: -a - G c <= -f
    ub = [[Fraction(-1)] + [-c[r] for c in sub] for r in range(R)]
    lp = LinearProgram(
        objective=[Fraction(N)] + [_ZERO] * len(sub),
        ub_matrix=ub,
        ub_rhs=[-v for v in fb],
        sense="min",
    )
    res = solve_lp(lp)
    if not res.optimal:
        raise InternalInconsistency(f"superhedging program returned {res.status} under NCA")
    a = res.x[0]
    combo = [sum((cv * c[r] for cv, c in zip(res.x[1:], sub)), _ZERO) for r in range(R)]
    cert = _certificate(model, Y, layout, cols, labels, combo, [a] * N, f)
    return res.value, cert


def super_price_general(model, f, Y=None, check=True):
    """Same price with a free transfer vector m and no deterministic exchanges."""
    Y = resolve_exchanges(model, Y)
    _require_nca(model, Y, check)
    N = model.n_agents
    layout, cols, labels = _columns(model, Y, None, with_deterministic=False)
    keep = independent_columns(_as_matrix(cols, layout.size)) if cols else []
    sub = [cols[k] for k in keep]
    fb = layout.stack(f.components)
    ub = []
    for r, (i, _) in enumerate(layout.cells):
        row = [Fraction(-int(k == i)) for k in range(N)] + [-c[r] for c in sub]
        ub.append(row)
    lp = LinearProgram(
        objective=[Fraction(1)] * N + [_ZERO] * len(sub),
        ub_matrix=ub,
        ub_rhs=[-v for v in fb],
        sense="min",
    )
    res = solve_lp(lp)
    if not res.optimal:
        raise InternalInconsistency(f"superhedging program returned {res.status} under NCA")
    return res.value


def _negate_cert(cert):
    return HedgeCertificate(
        tuple(-v for v in cert.transfer),
        tuple(s.scale(Fraction(-1)) for s in cert.strategies),
        tuple(-v for v in cert.exchange),
        tuple(-v for v in cert.deterministic),
        -cert.slack,
    )


def sub_price(model, f, Y=None, check=True):
    """rho_-(f) = -rho_+(-f); the certificate satisfies m + k + Y <= f."""
    value, cert = super_price(model, -f, Y, check)
    return -value, _negate_cert(cert)


def dual_super_price(model, f, Y=None, check=True):
    """max of sum_i E_{Q^i}[f^i] over the closed collective measure polytope."""
    Y = resolve_exchanges(model, Y)
    check_random_vector(model, f)
    _require_nca(model, Y, check)
    poly = collective_mm_polytope(model, Y)
    res = poly.optimize(Layout(model).stack(f.components), "max")
    if not res.optimal:
        raise InternalInconsistency(f"dual pricing program returned {res.status} under NCA")
    return res.value


def classical_super_price(model, i, g, check=True):
    """Single-agent superhedging price of the scalar claim g, primal and dual."""
    g = tuple(Fraction(v) for v in g)
    if not model.agents[i].filtration.is_measurable(model.horizon, g):
        raise NotMeasurable(f"claim is not measurable for agent {i} at the horizon")
    if check and not check_na_agent(model, i).holds:
        raise NaViolated(i)
    layout, cols, _ = _columns(model, None, [i])
    keep = independent_columns(_as_matrix(cols, layout.size)) if cols else []
    sub = [cols[k] for k in keep]
    gb = layout.embed(i, g)
    lp = LinearProgram(
        objective=[Fraction(1)] + [_ZERO] * len(sub),
        ub_matrix=[[Fraction(-1)] + [-c[r] for c in sub] for r in range(layout.size)],
        ub_rhs=[-v for v in gb],
        sense="min",
    )
    primal = solve_lp(lp)
    dual = agent_mm_polytope(model, i).optimize(gb, "max")
    if not (primal.optimal and dual.optimal) or primal.value != dual.value:
        raise InternalInconsistency(f"classical prices disagree for agent {i}")
    return primal.value


def decomposition_check(model, f, check=True):
    """With only deterministic exchanges the collective price splits into classical ones."""
    Y = ExchangeSpace()
    if check:
        for i in range(model.n_agents):
            if not check_na_agent(model, i).holds:
                raise NaViolated(i)
    rho, cert = super_price(model, f, Y, check=False)
    parts = [classical_super_price(model, i, f.components[i], check=False) for i in range(model.n_agents)]
    if rho != sum(parts):
        raise DecompositionViolated(f"collective price {rho} differs from sum of classical prices {sum(parts)}")
    share = rho / model.n_agents
    if any(m != share for m in cert.transfer) or any(v < 0 for c in cert.slack.components for v in c):
        raise DecompositionViolated("superhedge certificate is not in normal form")
    return {"collective": rho, "classical": tuple(parts)}


def replicate(model, f, Y=None) -> HedgeCertificate:
    """Exact f = m + k + Y, or NotReplicable with a left-kernel certificate.

    Same normal form as :func:`super_price`: m = a 1 and any zero-sum
    constant transfer is reported in ``deterministic``.
    """
    Y = resolve_exchanges(model, Y)
    check_random_vector(model, f)
    N = model.n_agents
    layout, cols, labels = _columns(model, Y, None)
    ones = [Fraction(1)] * layout.size
    M = _as_matrix(cols + [ones], layout.size)
    fb = layout.stack(f.components)
    try:
        x, _ = solve_linear_system(M, fb)
    except InconsistentSystem as exc:
        raise NotReplicable(exc.certificate) from None
    a = x[-1]
    combo = [v - a for v in fb]
    cert = _certificate(model, Y, layout, cols, labels, combo, [a] * N, f)
    if not cert.slack.is_zero():
        raise InternalInconsistency("replicating certificate leaves a residual")
    return cert


def is_replicable(model, f, Y=None) -> bool:
    try:
        replicate(model, f, Y)
    except NotReplicable:
        return False
    return True


def _face_max_t(model, f, Y, value):
    """Largest uniform lower bound on Q over the face where sum_i E_{Q^i}[f^i] = value."""
    poly = collective_mm_polytope(model, Y)
    row = Layout(model).stack(f.components)
    face = type(poly)(poly.n, poly.eq_matrix + (tuple(row),), poly.eq_rhs + (value,))
    return max_t(face)[0]


def price_gap(model, f, Y=None, check=True) -> PriceGap:
    Y = resolve_exchanges(model, Y)
    _require_nca(model, Y, check)
    lo, _ = sub_price(model, f, Y, check=False)
    hi, _ = super_price(model, f, Y, check=False)
    rep = is_replicable(model, f, Y)
    if rep != (lo == hi):
        raise IffViolated(f"replicable={rep} but prices {lo}, {hi}")
    if lo > hi:
        raise IffViolated(f"sub price {lo} exceeds super price {hi}")
    if not rep:
        for v in (hi, lo):
            t = _face_max_t(model, f, Y, v)
            if t is not None and t > 0:
                raise IffViolated(f"non-replicable claim priced at {v} by an equivalent measure")
    return PriceGap(lo, hi, rep)


def claim_basis(model, Y=None):
    """Indicator claims 1_A e_j over terminal blocks, plus the generators of Y."""
    Y = resolve_exchanges(model, Y)
    claims = []
    for j in range(model.n_agents):
        for B in model.terminal_blocks(j):
            claims.append(indicator_claim(model, j, B))
    return claims, list(Y.generators)


def completeness(model, Y=None, check=True) -> CompletenessReport:
    Y = resolve_exchanges(model, Y)
    _require_nca(model, Y, check)
    single = is_singleton(model, Y)
    indicators, gens = claim_basis(model, Y)
    ind_ok = all(is_replicable(model, f, Y) for f in indicators)
    prices_ok = True
    for f in indicators + gens:
        lo, _ = sub_price(model, f, Y, check=False)
        hi, _ = super_price(model, f, Y, check=False)
        if lo != hi:
            prices_ok = False
            break
    if single != ind_ok:
        raise EquivalenceViolated(f"singleton={single} but indicator replication={ind_ok}")
    if ind_ok != prices_ok:
        raise EquivalenceViolated(f"indicator replication={ind_ok} but price agreement={prices_ok}")
    return CompletenessReport(single, single, ind_ok, prices_ok)
