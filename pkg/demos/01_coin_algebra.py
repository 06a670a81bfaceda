"""Coin algebra for the fermion and photon walks.

The fermion coin uses a Dirac representation.  The mass operator is
Q = gamma0 and the shift generators are dP_a = gamma0 gamma_a.  They
pairwise anticommute and square to the identity.  The photon coin uses
the spin-1 generators J_a, whose spectral projectors P+, P-, P0 decide
whether a component hops along the axis or stays put.
"""

import numpy as np

from qcalab.coin import build_boson_coin, build_fermion_coin, eig_unitary, max_abs, unitary_from_hermitian, verify_coin_conditions

fermion = build_fermion_coin()
boson = build_boson_coin()

print("== fermion coin ==")
ops = [fermion.Q, *fermion.delta_p]
names = ["Q", "dPX", "dPY", "dPZ"]
for i in range(4):
    for j in range(i, 4):
        ac = ops[i] @ ops[j] + ops[j] @ ops[i]
        target = 2 * np.eye(4) if i == j else np.zeros((4, 4))
        print(f"  {{{names[i]}, {names[j]}}} deviation {max_abs(ac - target):.1e}")

report = verify_coin_conditions(fermion, strict=False)
print(f"  all conditions hold: {report.passed}, equal-norm constant c = {report.constants['c']}")

print("\n== photon coin ==")
for axis, label in enumerate("XYZ"):
    p = boson.projectors(axis)
    total = p["+"] + p["-"] + p["0"]
    print(f"  axis {label}: P+ + P- + P0 = I to {max_abs(total - np.eye(3)):.1e}, rank P0 = {np.linalg.matrix_rank(p['0'])}")
report = verify_coin_conditions(boson, strict=False)
print(f"  all conditions hold: {report.passed}, c = {report.constants['c']}, c' = {report.constants['c_prime']}")

print("\n== coin exponentials ==")
theta = 0.3
u = unitary_from_hermitian(fermion.Q, theta)
phases, _ = eig_unitary(u)
print(f"  exp(i theta Q) at theta = {theta} has eigenphases {np.round(phases, 12)}")
