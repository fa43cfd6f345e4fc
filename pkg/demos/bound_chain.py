#!/usr/bin/env python3
# Walk the chain of upper bounds for F_n - F_m = 7^a, from Matveev to the final cap.

from fibdiff.matveev import (CapKind, bound_after_reduction, combine_chain,
                             derive_nm_inequality, eta3_coefficient,
                             relaxation_is_valid, solve_self_referential)

p = 7

# first linear form: (n - m) log(alpha) - log 4 < K (1 + log n)
nm = derive_nm_inequality(p)
print("K(n-m)        ", nm.coefficient.decimal(8))

# second linear form, per unit of A_3 = log 20 + (n - m) log(alpha)
k3 = eta3_coefficient(p)
print("K per A_3     ", k3.decimal(8))

# substitute one into the other: n < c0 + c1 log n + c2 (log n)^2
quad = combine_chain(nm, k3)
for name, c in zip(("1", "log n", "(log n)^2"), quad.expanded()):
    print(f"  coeff {name:10s}", c.decimal(8))

# dominate by K (log n)^2 for n > 200, then solve for the cap
K = 146212 * 10 ** 21
print("relaxation ok ", relaxation_is_valid(K, quad, 201))
N1 = solve_self_referential(CapKind.LOG_SQUARED, K)
print("n <", N1)

# after the first reduction round n - m <= 161
K2, offset = bound_after_reduction(k3, 161)
N2 = solve_self_referential(CapKind.ONE_PLUS_LOG, K2, offset)
print("K after reduction", K2.decimal(8))
print("n <", N2)
