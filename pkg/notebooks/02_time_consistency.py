"""
Collective arbitrage over two periods
=====================================

The same market is free of collective arbitrage on (0,1) and on (1,2),
but exchanges agreed at time 1 and settled at time 2 create one on (0,2).
"""

from colmkt.arbitrage import check_nca, conditional_weights
from colmkt.audit import time_consistency
from colmkt.cli import bundled_path
from colmkt.market import ExchangeSpace, load_market, restrict_horizon, zero_sum_generators_from_partition

model = load_market(bundled_path("fig2.json"))

first = restrict_horizon(model, 0, 1)
print("(0,1) with constant transfers:", check_nca(first, ExchangeSpace()).holds)

# the second period starts from time-1 information
second = restrict_horizon(model, 1, 2)
rep = check_nca(second, zero_sum_generators_from_partition(second, 0))
print("(1,2) with time-1 exchanges:", rep.holds)
print("   conditional weights:", [str(w) for w in conditional_weights(second, rep.measure, 0)])

# over the whole horizon the exchange becomes a source of riskless profit
Y = zero_sum_generators_from_partition(model, 1)
rep = check_nca(model, Y)
w = rep.witness
print("(0,2):", rep.holds)
for ag, H in zip(model.agents, w.strategies):
    print("  ", ag.name, {(t, j): str(u) for (t, _, j), u in H.holdings.items()})
print("   outcome:", [[str(v) for v in comp] for comp in w.outcome.components])

# the audit summarises the same three windows
print(", ".join(f"NCA({s},{t})={'yes' if ok else 'no'}" for s, t, _, ok in time_consistency(model)))
