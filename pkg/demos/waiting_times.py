"""Collective and virtual waiting times: closed forms vs Monte Carlo.

Run: python demos/waiting_times.py
"""

import math

from entlink import mc, waiting

P, T_REQ = 0.3, 2

print(f"p = {P}, request at step {T_REQ}")
print("  M   E[W] closed   E[W] Monte Carlo")
cfg = mc.SimConfig(seed=99, trials=200_000)
for M in (1, 2, 4, 8):
    exact = waiting.collective_expected_infty(M, P, T_REQ)
    res = mc.simulate_collective(M, P, T_REQ, cfg)
    w = res["wait_samples"]
    se = w.std(ddof=1) / math.sqrt(w.size)
    print(f"  {M}   {exact:10.5f}   {w.mean():.5f} +/- {se:.5f}")

print("\npmf of the M = 4 collective waiting time:")
total = 0.0
for t in range(1, 9):
    pr = waiting.collective_pmf_infty(4, P, T_REQ, t)
    total += pr
    print(f"  Pr[W = {t}] = {pr:.5f}")
print(f"  (first 8 steps carry {total:.4f} of the mass)")

q = 0.5
e4 = waiting.collective_expected_infty(4, P, T_REQ)
print(f"\nvirtual link over the 4 links, joining succeeds with q = {q}:"
      f" E[W] = {waiting.virtual_expected(e4, q):.5f}")
