"""Joining protocols as exact channels: entanglement swapping chains, GHZ
extension, graph-state distribution, and a BBPSSW distillation round.

Run: python demos/joining_and_distillation.py
"""

import numpy as np

from entlink import qstate as Q

phi = Q.bell(2)
P = np.outer(phi, phi.conj())


def isotropic(f):
    return Q.DensityOperator(f * P + (1 - f) * (np.eye(4) - P) / 3, (2, 2))


print("swapping chains on isotropic links, F_in = 0.95:")
rho = isotropic(0.95)
for n in (1, 2):
    joint = Q.DensityOperator(Q.tensor(*([rho.mat] * (n + 1))), (2,) * (2 * n + 2))
    out = Q.swap_chain_channel(joint, n, 2)
    direct = Q.fidelity_to_pure(out, phi)
    formula = Q.swap_fidelity([Q.bell_overlap_table(rho, 2)] * (n + 1))
    print(f"  {n} middle node(s): F = {direct:.6f} (formula {formula:.6f})")

print("\nGHZ extension of the same links:")
for n in (1, 2):
    joint = Q.DensityOperator(Q.tensor(*([rho.mat] * (n + 1))), (2,) * (2 * n + 2))
    out = Q.ghz_swap_channel(joint, n)
    fid = Q.fidelity_to_pure(out, Q.ghz(n + 2))
    print(f"  {n + 2}-party GHZ: F = {fid:.6f}")

print("\ngraph-state distribution (triangle-free path graph on 3 vertices):")
A = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]])
joint = Q.DensityOperator(Q.tensor(*([rho.mat] * 3)), (2,) * 6)
out = Q.graph_dist_channel(joint, A)
print(f"  F = {Q.fidelity_to_pure(out, Q.graph_state(A)):.6f}")

print("\nBBPSSW distillation, two rounds from F = 0.75:")
f = 0.75
for rnd in (1, 2):
    p, f = Q.distill_bbpssw(f, f)
    print(f"  round {rnd}: p_succ = {p:.4f}, F = {f:.6f}")
