"""
Invariants on random markets
============================

Seeded random markets with exact arithmetic.  Every audit check is run on
each one and the outcomes are tallied.
"""

import random
from collections import Counter

from colmkt.arbitrage import check_na_agent, check_na_global, check_nca
from colmkt.audit import audit_market, random_claims
from colmkt.random_markets import random_market

rng = random.Random(7)
tally = Counter()
kinds = Counter()
for k in range(20):
    model, Y = random_market(rng)
    for c in audit_market(model, Y, random_claims(rng, model), seed=k):
        tally[(c.name, c.status)] += 1
    na = check_na_global(model).holds
    nca = check_nca(model, Y).holds
    na_i = all(check_na_agent(model, i).holds for i in range(model.n_agents))
    kinds[(na, nca, na_i)] += 1

for (name, status), n in sorted(tally.items()):
    print(f"{name:32s} {status:5s} {n}")

# (NA, NCA, all NA_i): NA implies NCA implies all NA_i
for key, n in sorted(kinds.items()):
    print(key, n)
assert not any(status == "fail" for _, status in tally)
