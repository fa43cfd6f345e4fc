#!/usr/bin/env python3
# A solution with a >= 2 sitting well inside the search range.

from fibdiff.pipeline import PipelineConfig, brute_force_search, run_full_proof
from fibdiff.sequences import fib

print(fib(14), "-", fib(9), "=", fib(14) - fib(9), "= 7^3:", fib(14) - fib(9) == 7 ** 3)

hits = [t for t in brute_force_search(7, 200) if t.a >= 1]
print("a >= 1 hits for p=7:", [t.as_list() for t in hits])

# the full proof keeps it: the verdict is the union of everything found below the cap
cert = run_full_proof(PipelineConfig(7))
print("verdict:", [t.as_list() for t in cert.verdict])

# n - m = 5 is odd, so no factorization shortcut applies to it; only the search sees it
for p in (7, 13, 5, 11):
    big = [t.as_list() for t in brute_force_search(p, 200) if t.a >= 2]
    print(f"p={p:<3} a>=2:", big)
