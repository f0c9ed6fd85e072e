#!/usr/bin/env python3
"""
Spectrum of the momentum-space Hamiltonian H(k) = a.k + m b.

For every k and m the six eigenvalues are +-sqrt(k^2 + m^2) twice each
(the physical transverse branch) and +-m once each (the spurious
longitudinal branch whose frequency ignores k entirely).  The constraints
div u = div v = 0 remove exactly that spurious branch.
"""
import numpy as np

from spin1wave import algebra

m = 1.0
print(f"mass m = {m}")
print(f"{'|k|':>6} | eigenvalues of H(k)")
print("-" * 64)
for kz in (0.0, 0.5, 1.0, 2.0, 4.0):
    ev = np.linalg.eigvalsh(algebra.hamiltonian_symbol((0, 0, kz), m))
    pretty = "  ".join(f"{x:+.4f}" for x in np.sort(ev))
    print(f"{kz:6.2f} | {pretty}")

print()
print("the +-m pair never moves: that is the longitudinal (spurious) branch")
print()

rng = np.random.default_rng(1)
worst = 0.0
for _ in range(100):
    k = 5.0 * rng.standard_normal(3)
    mm = 2.0 * abs(rng.standard_normal())
    ev = np.sort(np.linalg.eigvalsh(algebra.hamiltonian_symbol(k, mm)))
    ref = algebra.analytic_eigenvalues(k, mm)
    worst = max(worst, np.max(np.abs(ev - ref)))
print(f"100 random (k, m): max |eigensolver - analytic| = {worst:.3e}")

print()
print("eigenvectors: transverse modes are divergence-free by construction")
k = np.array([0.7, -1.3, 0.4])
psi = algebra.eigenmode(k, m, +1, "t1")
print(f"  |k.u| = {abs(k @ psi[:3]):.2e},  |k.v| = {abs(k @ psi[3:]):.2e}")
psi_l = algebra.eigenmode(k, m, +1, "long")
h = algebra.hamiltonian_symbol(k, m)
print(f"  longitudinal mode: |H psi - m psi| = {np.linalg.norm(h @ psi_l - m * psi_l):.2e}")
