"""
Two agents, two stocks, one exchange rule
=========================================

Each agent trades one stock and is arbitrage free alone.  Trading both
stocks is not.  Allowing zero-sum exchanges fixed at time 1 pins down a
single pair of pricing measures and makes every claim replicable.
"""

from fractions import Fraction

from colmkt.arbitrage import agent_mm_polytope, check_na_agent, check_na_global, check_nca
from colmkt.cli import bundled_path
from colmkt.hedging import completeness, price_gap, super_price
from colmkt.market import ExchangeSpace, indicator_claim, load_market, zero_sum_generators_from_partition
from colmkt.polytope import enumerate_vertices

model = load_market(bundled_path("fig1.json"))

# each agent alone: a one-parameter segment of martingale measures
for i, ag in enumerate(model.agents):
    print(ag.name, "NA:", check_na_agent(model, i).holds)
    for v in enumerate_vertices(agent_mm_polytope(model, i)):
        print("   endpoint", [str(x) for x in v])

# one trader seeing both stocks finds an arbitrage
print("global NA:", check_na_global(model).holds)

# exchanges that are zero-sum on the time-1 blocks
Y = zero_sum_generators_from_partition(model, 1)
rep = check_nca(model, Y)
print("NCA:", rep.holds, "t* =", rep.t_star)
for ag, q in zip(model.agents, rep.measure.per_agent):
    print("  ", ag.name, [str(x) for x in q])

# the indicator of {w1, w2} for agent 1 now has one price
f = indicator_claim(model, 0, ["w1", "w2"])
rho, cert = super_price(model, f, Y)
print("super price:", rho, "transfer:", [str(m) for m in cert.transfer])
print("complete with Y:", completeness(model, Y).complete)
print("complete without:", completeness(model, ExchangeSpace()).complete)

# without exchanges the same claim has a price interval
gap = price_gap(model, f, ExchangeSpace())
print("interval without exchanges:", gap.lower, gap.upper)
assert rho == Fraction(1, 4)
