"""Photon fields built from walk modes.

The long-wavelength photon Hamiltonian at momentum k has energies
0 and +-c hbar |k|.  The zero mode points along k, and the positive
mode is built from two transverse polarization vectors.  Summing
plane-wave modes gives a real potential A with its fields E and B.  These satisfy the
source-free Maxwell equations up to round-off.  Scaling the frequency
away from c|k| breaks Faraday's law, which acts as a check that the
residuals mean something.
"""

import numpy as np

from qcalab import fields
from qcalab.lattice import LatticeSpec
from qcalab.spectrum import photon_hamiltonian, polarization_vectors

spec = LatticeSpec(8)
k = np.array([0.3, -0.4, 1.2])

print("== photon Hamiltonian ==")
ph = photon_hamiltonian(k, spec)
print(f"  energies {np.round(ph.energies, 12)}, c|k| = {spec.c * np.linalg.norm(k):.12f}")
print(f"  |v0 . k_hat| = {abs(np.vdot(ph.v_zero, k / np.linalg.norm(k))):.12f}")
p = polarization_vectors(k)
print(f"  e1 = {np.round(p.e1, 4)}, e2 = {np.round(p.e2, 4)}, e1 x e2 . k_hat = {np.cross(p.e1, p.e2) @ k / np.linalg.norm(k):.3f}")

print("\n== Maxwell residuals for 20 random modes ==")
modes = fields.random_mode_amplitudes(spec, 20, np.random.default_rng(1))
for t in (0.0, 1.0, 10.0):
    rep = fields.maxwell_residuals(modes, t)
    print(f"  t = {t:4.1f}: " + ", ".join(f"{name} {v:.1e}" for name, v in rep.as_dict().items()))
bad = fields.maxwell_residuals(modes, 1.0, frequency_scale=1.1)
print(f"  frequency scaled by 1.1: faraday {bad.faraday:.3f}")
print(f"\n  field energy {fields.photon_energy(modes):.6f}")
