"""
Collectively self-financing strategies
======================================

Risky holdings plus an exchange schedule determine the riskless holdings.
The terminal wealth is initial wealth plus trading gains plus the summed
exchanges.
"""

from fractions import Fraction

from colmkt.cli import bundled_path
from colmkt.gains import AgentStrategy, lift_to_csf, value_decomposition, value_process
from colmkt.market import ExchangeSchedule, RandomVector, load_market

model = load_market(bundled_path("fig2.json"))
everything = tuple(range(model.n_atoms))

# buy one unit at time 0, sell at time 1
risky = (AgentStrategy({(1, everything, 0): Fraction(1)}), AgentStrategy({(1, everything, 1): Fraction(1)}))

# at time 2 agent 1 pays agent 2 on {w5, w6} and receives on {w3, w4}
y = tuple(Fraction(v) for v in (0, 0, 1, 1, -1, -1))
zero = (Fraction(0),) * model.n_atoms
schedule = ExchangeSchedule((RandomVector((zero, zero)), RandomVector((y, tuple(-v for v in y)))))

v0 = (Fraction(0), Fraction(0))
csf = lift_to_csf(model, v0, risky, schedule)
V = value_process(model, csf, schedule)
for ag, rows in zip(model.agents, V):
    print(ag.name, "terminal wealth:", [str(v) for v in rows[-1]])

# the definitional value process and the decomposition agree everywhere
print("two ways agree:", V == value_decomposition(model, v0, risky, schedule))
for (i, t, block), h in sorted(csf.riskless.items()):
    print("   riskless", model.agents[i].name, "t =", t, [model.atoms[a] for a in block], h)
