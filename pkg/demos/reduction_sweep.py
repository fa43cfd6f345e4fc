#!/usr/bin/env python3
# The second reduction round for p = 13: one convergent, every n - m in [3, 160].

from fibdiff.pipeline import can_eliminate
from fibdiff.realnum import ALPHA
from fibdiff.reduction import cf_expand, gamma_expr, sweep_mu_family

p, M = 13, 15899621741409191

cf = cf_expand(gamma_expr(p), 6 * M, extra_terms=10)
k = cf.first_index_above(6 * M)
print("first convergent past 6M: index", k, "q =", cf.convergents[k][1])

# keep going until every exception has a factorization argument
res = sweep_mu_family(p, (3, 160), M, 13, ALPHA,
                      accept=lambda r: all(can_eliminate(p, d, 200) for d in r.exceptions))
for a in res.attempts:
    print(f"  q={a['q']:<22} exceptions={a['exceptions']} accepted={a['accepted']}")

print("exceptions", res.exceptions)
print("eps in    ", res.eps_min.decimal(6), "..", res.eps_max.decimal(6))
print("threshold ", res.threshold.decimal(10))

# the five largest eps values, the top one sets the upper end of the range
top = sorted(res.rows, key=lambda r: r.epsilon.hi, reverse=True)[:5]
for r in top:
    print(f"  n-m={r.d:<4} eps={r.epsilon.decimal(8)}")
