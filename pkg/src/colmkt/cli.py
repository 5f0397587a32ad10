"""Command-line front end: ``colmkt <verb> market.json [claim.json] [options]``.

Exit codes: 0 when the property holds or the computation succeeded, 2 when
the property is violated (a witness is printed), 1 on input errors.
"""

import argparse
import json
import os
import random
import sys
from fractions import Fraction
from importlib import resources

from . import arbitrage, audit, gains, hedging
from .errors import DimensionLimitExceeded, MarketError, NcaViolated, NotReplicable, OracleFailure
from .market import (
    ExchangeSchedule,
    ExchangeSpace,
    RandomVector,
    exchange_space,
    fmt,
    load_market,
    parse_random_vector,
    parse_rational,
    restrict_horizon,
    serialize_market,
    zero_sum_generators_from_partition,
)
from .polytope import enumerate_vertices, max_vertex_dim
from .random_markets import random_market

BUNDLED = ("fig1.json", "fig2.json")
VERBS = (
    "validate", "na", "nca", "measures", "vertices", "superhedge", "subhedge", "gap",
    "replicate", "complete", "priceset", "extend", "csf-roll", "audit",
)
CLAIM_VERBS = ("superhedge", "subhedge", "gap", "replicate", "priceset", "extend")


class UsageError(Exception):
    pass


def bundled_path(name):
    return str(resources.files("colmkt").joinpath("data", name))


def _market_path(path):
    if not os.path.exists(path) and os.path.basename(path) in BUNDLED:
        return bundled_path(os.path.basename(path))
    return path


# ---------------------------------------------------------------- rendering


def _rv(model, rv):
    return {ag.name: {a: fmt(v) for a, v in zip(model.atoms, comp)} for ag, comp in zip(model.agents, rv.components)}


def _measure(model, Q, agents=None):
    agents = range(model.n_agents) if agents is None else agents
    return {model.agents[i].name: {a: fmt(v) for a, v in zip(model.atoms, q)} for i, q in zip(agents, Q.per_agent)}


def _strategy(model, i, H):
    rows = []
    for (t, block, j), units in sorted(H.holdings.items(), key=lambda kv: (kv[0][0], kv[0][1], kv[0][2])):
        if units:
            rows.append(
                {
                    "t": t,
                    "block": [model.atoms[a] for a in block],
                    "asset": model.asset_names[j],
                    "units": fmt(units),
                }
            )
    return rows


def _strategies(model, strategies):
    return {model.agents[i].name: _strategy(model, i, H) for i, H in enumerate(strategies)}


def _witness(model, w):
    return {
        "strategies": _strategies(model, w.strategies),
        "exchange_coefficients": [fmt(c) for c in w.exchange_coefficients],
        "deterministic_transfer": [fmt(c) for c in w.transfer],
        "outcome": _rv(model, w.outcome),
    }


def _certificate(model, cert):
    return {
        "transfer": [fmt(v) for v in cert.transfer],
        "deterministic_exchange": [fmt(v) for v in cert.deterministic],
        "exchange_coefficients": [fmt(v) for v in cert.exchange],
        "strategies": _strategies(model, cert.strategies),
        "slack": _rv(model, cert.slack),
    }


def _render_table(obj, indent=0):
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v and not _flat_list(v):
                lines.append(f"{pad}{k}:")
                lines.extend(_render_table(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_scalar(v)}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)) and not _flat_list(v):
                lines.append(f"{pad}-")
                lines.extend(_render_table(v, indent + 1))
            else:
                lines.append(f"{pad}- {_scalar(v)}")
    else:
        lines.append(f"{pad}{_scalar(obj)}")
    return lines


def _flat_list(v):
    return isinstance(v, list) and all(not isinstance(x, (dict, list)) for x in v)


def _scalar(v):
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, list):
        return "(" + ", ".join(_scalar(x) for x in v) + ")"
    if isinstance(v, dict):
        return "{}"
    if v is None:
        return "-"
    return str(v)


def emit(report, as_json, out):
    if as_json:
        out.write(json.dumps(report, indent=2) + "\n")
    else:
        out.write("\n".join(_render_table(report)) + "\n")


# ---------------------------------------------------------------- inputs


def parse_horizon(text):
    try:
        s, t = (int(x) for x in text.split(":"))
    except ValueError:
        raise UsageError(f"--horizon expects s:t, got {text!r}") from None
    return s, t


def resolve_cli_exchanges(model, choice, offset):
    """--exchanges deterministic | file | zero_sum_partition:t=<time>."""
    if choice is None or choice == "file":
        return exchange_space(model)
    if choice == "deterministic":
        return ExchangeSpace()
    mode, _, params = choice.partition(":")
    if mode == "zero_sum_partition":
        opts = dict(p.split("=", 1) for p in params.split(",") if p)
        if "t" not in opts:
            raise UsageError("zero_sum_partition needs a time, e.g. zero_sum_partition:t=1")
        t = int(opts["t"]) - offset
        if not 0 <= t <= model.horizon:
            raise UsageError(f"exchange time {opts['t']} lies outside the analysed horizon")
        return zero_sum_generators_from_partition(model, t)
    raise UsageError(f"unknown exchange mode {choice!r}")


def load_claim(model, path):
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    return parse_random_vector(model, data)


def load_csf_inputs(model, path):
    """v0, risky strategies and exchange schedule from a JSON file."""
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    N = model.n_agents
    v0 = [parse_rational(v) for v in data.get("v0", ["0"] * N)]
    if len(v0) != N:
        raise MarketError(f"v0 needs {N} entries")
    names = {n: j for j, n in enumerate(model.asset_names)}
    risky = []
    raw = data.get("strategies", [[] for _ in range(N)])
    if len(raw) != N:
        raise MarketError(f"strategies needs {N} entries")
    for i, rows in enumerate(raw):
        holdings = {}
        for row in rows:
            asset = row["asset"]
            j = names[asset] if isinstance(asset, str) else int(asset) - 1
            block = tuple(sorted(model.atom(a) for a in row["block"]))
            key = (int(row["t"]), block, j)
            holdings[key] = holdings.get(key, Fraction(0)) + parse_rational(row["units"])
        risky.append(gains.AgentStrategy(holdings))
    sched_raw = data.get("schedule")
    if sched_raw is None:
        per_time = [RandomVector.zeros(N, model.n_atoms)] * model.horizon
    else:
        if len(sched_raw) != model.horizon:
            raise MarketError(f"schedule needs {model.horizon} entries (t = 1..T)")
        per_time = [_schedule_entry(model, comps) for comps in sched_raw]
    return v0, risky, ExchangeSchedule(tuple(per_time))


def _schedule_entry(model, comps):
    if len(comps) != model.n_agents:
        raise MarketError(f"each schedule entry needs {model.n_agents} components")
    return RandomVector(tuple(tuple(parse_rational(c[a]) for a in model.atoms) for c in comps))


# ---------------------------------------------------------------- verbs


def cmd_validate(ctx):
    m = ctx.model
    prices = {}
    for name, asset in zip(m.asset_names, m.prices):
        row = asset[0]
        prices[name] = fmt(row[0]) if len(set(row)) == 1 else {a: fmt(v) for a, v in zip(m.atoms, row)}
    return 0, {
        "valid": True,
        "atoms": m.n_atoms,
        "agents": m.n_agents,
        "assets": m.n_assets,
        "horizon": m.horizon,
        "initial_prices": prices,
    }


def _nca_report(model, rep, agents=None):
    out = {"holds": rep.holds, "t_star": fmt(rep.t_star) if rep.t_star is not None else None}
    if rep.holds:
        out["measure"] = _measure(model, rep.measure, agents)
    else:
        out["witness"] = _witness(model, rep.witness)
    return out


def cmd_na(ctx):
    m = ctx.model
    if ctx.args.agent is None:
        g = arbitrage.global_model(m)
        rep = arbitrage.check_na_global(m)
        report = {"scope": "global"}
        report.update(_nca_report(g, rep))
    else:
        i = ctx.args.agent - 1
        if not 0 <= i < m.n_agents:
            raise UsageError(f"--agent must lie in 1..{m.n_agents}")
        rep = arbitrage.check_na_agent(m, i)
        report = {"scope": m.agents[i].name}
        report.update(_nca_report(m, rep, [i]))
    return (0 if rep.holds else 2), report


def cmd_nca(ctx):
    rep = arbitrage.check_nca(ctx.model, ctx.Y)
    report = _nca_report(ctx.model, rep)
    if not rep.holds:
        w = rep.witness
        y = RandomVector.zeros(ctx.model.n_agents, ctx.model.n_atoms).shift(w.transfer)
        for c, g in zip(w.exchange_coefficients, ctx.Y.generators):
            y = y + g.scale(c)
        report["witness"]["exchange"] = _rv(ctx.model, y)
    return (0 if rep.holds else 2), report


def cmd_measures(ctx):
    m = ctx.model
    report = {"agents": {}}
    for i, ag in enumerate(m.agents):
        poly = arbitrage.agent_mm_polytope(m, i)
        layout = arbitrage.Layout(m, [i])
        verts = enumerate_vertices(poly, ctx.vertex_limit)
        report["agents"][ag.name] = [
            {a: fmt(v) for a, v in zip(m.atoms, layout.measure(x).per_agent[i])} for x in verts
        ]
    poly = arbitrage.collective_mm_polytope(m, ctx.Y)
    t, point = arbitrage.max_t(poly)
    holds = t is not None and t > 0
    coll = {"nonempty": holds, "t_star": fmt(t) if t is not None else None}
    if holds:
        coll["measure"] = _measure(m, arbitrage.Layout(m).measure(point))
        coll["singleton"] = arbitrage.is_singleton(m, ctx.Y)
    report["collective"] = coll
    return (0 if holds else 2), report


def cmd_vertices(ctx):
    m = ctx.model
    poly = arbitrage.collective_mm_polytope(m, ctx.Y)
    layout = arbitrage.Layout(m)
    verts = enumerate_vertices(poly, ctx.vertex_limit)
    return 0, {
        "count": len(verts),
        "vertices": [
            {"full_support": all(v > 0 for v in x), "measure": _measure(m, layout.measure(x))} for x in verts
        ],
    }


def _claim_guard(ctx):
    rep = arbitrage.check_nca(ctx.model, ctx.Y)
    if not rep.holds:
        return {"error": "collective arbitrage present", "witness": _witness(ctx.model, rep.witness)}
    return None


def cmd_superhedge(ctx, sub=False):
    bad = _claim_guard(ctx)
    if bad:
        return 2, bad
    fn = hedging.sub_price if sub else hedging.super_price
    value, cert = fn(ctx.model, ctx.claim, ctx.Y, check=False)
    return 0, {"price": fmt(value), "certificate": _certificate(ctx.model, cert)}


def cmd_gap(ctx):
    bad = _claim_guard(ctx)
    if bad:
        return 2, bad
    g = hedging.price_gap(ctx.model, ctx.claim, ctx.Y, check=False)
    return 0, {"lower": fmt(g.lower), "upper": fmt(g.upper), "replicable": g.replicable}


def cmd_replicate(ctx):
    m = ctx.model
    try:
        cert = hedging.replicate(m, ctx.claim, ctx.Y)
    except NotReplicable as exc:
        layout = arbitrage.Layout(m)
        cells = [
            {"agent": m.agents[i].name, "block": [m.atoms[a] for a in b], "weight": fmt(y)}
            for (i, b), y in zip(layout.cells, exc.certificate)
            if y
        ]
        return 2, {"replicable": False, "certificate": cells}
    return 0, {"replicable": True, "certificate": _certificate(m, cert)}


def cmd_complete(ctx):
    bad = _claim_guard(ctx)
    if bad:
        return 2, bad
    rep = hedging.completeness(ctx.model, ctx.Y, check=False)
    return (0 if rep.complete else 2), {
        "complete": rep.complete,
        "singleton": rep.singleton,
        "indicators_replicable": rep.indicators_replicable,
        "prices_agree": rep.prices_agree,
    }


def cmd_priceset(ctx):
    m = ctx.model
    bad = _claim_guard(ctx)
    if bad:
        return 2, bad
    try:
        ps = arbitrage.price_set(m, ctx.claim, ctx.Y, ctx.vertex_limit)
    except DimensionLimitExceeded as exc:
        lo, _ = hedging.sub_price(m, ctx.claim, ctx.Y, check=False)
        hi, _ = hedging.super_price(m, ctx.claim, ctx.Y, check=False)
        return 0, {
            "sum_range": [fmt(lo), fmt(hi)],
            "replicable": hedging.is_replicable(m, ctx.claim, ctx.Y),
            "vertices": None,
            "note": str(exc),
        }
    return 0, {
        "vertices": [[fmt(v) for v in p] for p in ps.closure_vertices],
        "sum_range": [fmt(v) for v in ps.sum_range],
        "replicable": ps.replicable,
        "closed": ps.closed,
    }


def cmd_extend(ctx):
    rep = arbitrage.check_nca(ctx.model, ctx.Y)
    if not rep.holds:
        return 2, {"error": "collective arbitrage present", "witness": _witness(ctx.model, rep.witness)}
    ext = arbitrage.extended_market(ctx.model, ctx.claim, rep.measure, ctx.Y)
    return 0, json.loads(serialize_market(ext))


def cmd_csf_roll(ctx):
    m = ctx.model
    v0, risky, sched = load_csf_inputs(m, ctx.args.extra)
    lifted = gains.lift_to_csf(m, v0, risky, sched)
    V = gains.value_process(m, lifted, sched)
    agree = V == gains.value_decomposition(m, v0, risky, sched)
    report = {
        "value": {
            ag.name: [{a: fmt(v) for a, v in zip(m.atoms, row)} for row in V[i]] for i, ag in enumerate(m.agents)
        },
        "riskless": {
            m.agents[i].name + f"@t={t}": {"block": [m.atoms[a] for a in block], "units": fmt(h)}
            for (i, t, block), h in sorted(lifted.riskless.items(), key=lambda kv: kv[0])
        },
        "matches_decomposition": agree,
    }
    return (0 if agree else 2), report


def _audit_rows(checks):
    return [{"property": c.name, "status": c.status, "detail": c.detail} for c in checks]


def cmd_audit(ctx):
    args = ctx.args
    if args.random:
        n = int(args.random.split("=", 1)[-1])
        rng = random.Random(args.seed)
        counts = {}
        for k in range(n):
            model, Y = random_market(rng)
            claims = audit.random_claims(rng, model)
            checks = audit.audit_market(model, Y, claims, seed=args.seed + k)
            for c in checks:
                counts.setdefault(c.name, {"pass": 0, "fail": 0, "skip": 0})[c.status] += 1
                if c.status == "fail":
                    return 2, {
                        "failed": c.name,
                        "detail": c.detail,
                        "instance": k,
                        "market": json.loads(serialize_market(model)),
                        "exchanges": [_rv(model, g) for g in Y.generators],
                    }
        return 0, {"instances": n, "seed": args.seed, "properties": counts}
    checks = audit.audit_market(ctx.model, ctx.Y)
    status = 2 if any(c.status == "fail" for c in checks) else 0
    report = {"checks": _audit_rows(checks)}
    if status:
        report["market"] = json.loads(serialize_market(ctx.model))
    return status, report


class _Ctx:
    pass


def build_parser():
    p = argparse.ArgumentParser(prog="colmkt", description="Collective arbitrage and hedging on finite markets.")
    p.add_argument("verb", choices=VERBS)
    p.add_argument("market", nargs="?", help="market file (fig1.json / fig2.json resolve to bundled copies)")
    p.add_argument("extra", nargs="?", help="claim file, or strategy file for csf-roll")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--exchanges", help="deterministic | file | zero_sum_partition:t=<time>")
    p.add_argument("--horizon", help="analyse times s..t only, as s:t")
    p.add_argument("--agent", type=int, help="1-based agent index for the na verb (default: global)")
    p.add_argument("--max-vertex-dim", type=int, dest="max_vertex_dim")
    p.add_argument("--random", help="audit n random markets, as n=<int>")
    p.add_argument("--seed", type=int, default=0)
    return p


def run(argv, out=None, err=None):
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and 1
    ctx = _Ctx()
    ctx.args = args
    try:
        ctx.vertex_limit = max_vertex_dim(args.max_vertex_dim)
        if not (args.verb == "audit" and args.random):
            if not args.market:
                raise UsageError(f"{args.verb} needs a market file")
            model = load_market(_market_path(args.market))
            offset = 0
            if args.horizon:
                s, t = parse_horizon(args.horizon)
                model = restrict_horizon(model, s, t)
                offset = s
            ctx.model = model
            ctx.Y = resolve_cli_exchanges(model, args.exchanges, offset)
            if args.verb in CLAIM_VERBS:
                if not args.extra:
                    raise UsageError(f"{args.verb} needs a claim file")
                ctx.claim = load_claim(model, args.extra)
            if args.verb == "csf-roll" and not args.extra:
                raise UsageError("csf-roll needs a strategy file")
        handler = {
            "validate": cmd_validate,
            "na": cmd_na,
            "nca": cmd_nca,
            "measures": cmd_measures,
            "vertices": cmd_vertices,
            "superhedge": cmd_superhedge,
            "subhedge": lambda c: cmd_superhedge(c, sub=True),
            "gap": cmd_gap,
            "replicate": cmd_replicate,
            "complete": cmd_complete,
            "priceset": cmd_priceset,
            "extend": cmd_extend,
            "csf-roll": cmd_csf_roll,
            "audit": cmd_audit,
        }[args.verb]
        code, report = handler(ctx)
    except (UsageError, MarketError, OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        err.write(f"error: {exc}\n")
        return 1
    except DimensionLimitExceeded as exc:
        err.write(f"error: {exc}\n")
        return 1
    except (OracleFailure, NcaViolated) as exc:
        err.write(f"violated: {type(exc).__name__}: {exc}\n")
        return 2
    emit(report, args.json, out)
    return code


def main():
    sys.exit(run(sys.argv[1:]))
