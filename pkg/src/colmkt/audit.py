"""Batch invariant checks over one market (used by ``colmkt audit``)."""

import random
from dataclasses import dataclass
from fractions import Fraction

from .arbitrage import check_na_agent, check_nca, extended_market, implications_audit, is_zero_sum
from .errors import OracleFailure
from .gains import lift_to_csf, value_decomposition, value_process
from .hedging import (
    claim_basis,
    completeness,
    decomposition_check,
    dual_super_price,
    price_gap,
    super_price,
    super_price_general,
)
from .market import (
    ExchangeSpace,
    MarketModel,
    RandomVector,
    restrict_horizon,
    zero_sum_generators_from_partition,
)
from .random_markets import random_claim, random_schedule, random_strategy


@dataclass(frozen=True)
class Check:
    name: str
    status: str  # "pass" | "fail" | "skip"
    detail: str = ""


def _run(name, fn):
    try:
        detail = fn()
    except OracleFailure as exc:
        return Check(name, "fail", f"{type(exc).__name__}: {exc}")
    return Check(name, "pass", detail or "")


def _each(fn, items):
    for x in items:
        fn(x)


def _hedging_properties(model, f, Y):
    N = model.n_agents
    rho, cert = super_price(model, f, Y, check=False)
    zero = RandomVector.zeros(N, model.n_atoms)
    if super_price(model, zero, Y, check=False)[0] != 0:
        raise OracleFailure("rho(0) != 0")
    c = [Fraction(k + 1, 2) for k in range(N)]
    if super_price(model, f.shift(c), Y, check=False)[0] != rho + sum(c):
        raise OracleFailure("cash additivity fails")
    bump = RandomVector(tuple(tuple(abs(v) for v in comp) for comp in f.components))
    if super_price(model, f + bump, Y, check=False)[0] < rho:
        raise OracleFailure("monotonicity fails")
    for lam in (Fraction(0), Fraction(1, 2), Fraction(3)):
        if super_price(model, f.scale(lam), Y, check=False)[0] != lam * rho:
            raise OracleFailure(f"positive homogeneity fails at {lam}")
    if any(m != rho / N for m in cert.transfer) or any(v < 0 for comp in cert.slack.components for v in comp):
        raise OracleFailure("attaining certificate not in normal form")


def time_consistency(model):
    """NCA on each one-period window with exchanges fixed one period earlier, and on the full horizon."""
    rows = []
    T = model.horizon
    windows = [(s, s + 1, s) for s in range(T)]
    if T > 1:
        windows.append((0, T, T - 1))
    for s, t, when in windows:
        sub = restrict_horizon(_strip_exchanges(model), s, t)
        Y = zero_sum_generators_from_partition(sub, when - s)
        rows.append((s, t, when, check_nca(sub, Y).holds))
    return rows


def _strip_exchanges(model):
    return MarketModel(
        model.atoms, model.prob, model.horizon, model.asset_names, model.prices, model.agents, None, model.conditional
    )


def _implications_detail(model, Y):
    rep = implications_audit(model, Y)
    yn = lambda b: "yes" if b else "no"
    agents = ",".join(yn(b) for b in rep.na_agents)
    return f"NA={yn(rep.na_global)}, NCA={yn(rep.nca)}, NA_i={agents}"


def audit_market(model, Y, claims=None, seed=0):
    """Run every applicable invariant check; returns a list of :class:`Check`."""
    rng = random.Random(seed)
    out = []
    if claims is None:
        claims, _ = claim_basis(model, Y)
    if is_zero_sum(Y):
        out.append(_run("implications (Y)", lambda: _implications_detail(model, Y)))
    else:
        out.append(Check("implications (Y)", "skip", "exchange space is not zero-sum"))
    out.append(_run("implications (deterministic)", lambda: _implications_detail(model, ExchangeSpace())))
    nca = check_nca(model, Y)
    out.append(Check("nca primal/dual agreement", "pass", "holds" if nca.holds else "violated"))
    if nca.holds:

        def duality():
            for f in claims:
                p = super_price(model, f, Y, check=False)[0]
                if p != dual_super_price(model, f, Y, check=False) or p != super_price_general(model, f, Y, check=False):
                    raise OracleFailure("super price differs from its dual")

        out.append(_run("duality", duality))
        out.append(_run("replication iff gap", lambda: _each(lambda f: price_gap(model, f, Y, check=False), claims)))
        out.append(_run("hedging properties", lambda: _each(lambda f: _hedging_properties(model, f, Y), claims)))
        out.append(_run("completeness equivalence", lambda: "complete" if completeness(model, Y, check=False).complete else "incomplete"))

        def extension():
            for f in claims:
                ext = extended_market(model, f, nca.measure, Y)
                if not check_nca(ext, Y).holds:
                    raise OracleFailure("extended market admits collective arbitrage")

        out.append(_run("extended market", extension))
    else:
        for name in ("duality", "replication iff gap", "hedging properties", "completeness equivalence", "extended market"):
            out.append(Check(name, "skip", "NCA fails"))
    if all(check_na_agent(model, i).holds for i in range(model.n_agents)):
        out.append(_run("decomposition", lambda: _each(lambda f: decomposition_check(model, f, check=False), claims)))
    else:
        out.append(Check("decomposition", "skip", "some agent admits arbitrage"))

    def csf():
        for _ in range(5):
            v0 = [Fraction(rng.randint(-3, 3)) for _ in range(model.n_agents)]
            risky = [random_strategy(rng, model, i) for i in range(model.n_agents)]
            sched = random_schedule(rng, model)
            lifted = lift_to_csf(model, v0, risky, sched)
            if value_process(model, lifted, sched) != value_decomposition(model, v0, risky, sched):
                raise OracleFailure("value process differs from its decomposition")

    out.append(_run("csf decomposition", csf))
    if not model.conditional:
        rows = time_consistency(model)
        detail = ", ".join(f"NCA({s},{t})={'yes' if ok else 'no'}" for s, t, _, ok in rows)
        out.append(Check("time consistency report", "pass", detail))
    return out


def random_claims(rng, model, n=2):
    return [random_claim(rng, model) for _ in range(n)]
