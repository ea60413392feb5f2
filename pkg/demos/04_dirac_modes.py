"""
Two-spinor Dirac modes
======================

Plane waves of the free Dirac equation written for a pair of 2-spinors
(psi^A, xi_A').  Each wave vector gives a 4 x 4 mode matrix whose
eigenvalues are +-sqrt(k^2 + m^2).
"""
import numpy as np

from nambulab.dirac import (
    SpinorMode,
    spinor_identity_residuals,
    dirac_hamiltonian,
    dirac_residual,
    eigenmodes,
    evolve_modes,
    hamilton_equations_check,
    mode_norm,
)

print("spinor identities, worst residual:", f"{max(spinor_identity_residuals().values()):.1e}")

k, m = np.array([4.0, 0.0, 0.0]), 3.0
print("eigenvalues for |k|=4, m=3:", np.round(np.linalg.eigvalsh(dirac_hamiltonian(k, m)), 12))

for E, mode in eigenmodes(k, m):
    print(f"E={E:+.3f}  Dirac residual {dirac_residual(mode, E, m):.1e}")

rng = np.random.default_rng(0)
modes = [
    (SpinorMode.from_state(rng.normal(size=3), rng.normal(size=4) + 1j * rng.normal(size=4)), 1.0)
    for _ in range(5)
]
n0 = mode_norm(modes)
for t in (1.0, 10.0, 100.0):
    print(f"t={t:5.1f}: norm drift {abs(mode_norm(evolve_modes(modes, 1.0, t)) - n0):.1e}")

print("Hamilton's equations, finite-difference check:", f"{hamilton_equations_check(modes, 1.0):.1e}")

# a boosted observer sees a different but equivalent mode matrix
n = np.array([np.cosh(0.3), 0.0, 0.0, np.sinh(0.3)])
print("boosted frame eigenvalues:", np.round(np.sort(np.linalg.eigvals(dirac_hamiltonian(k, m, n)).real), 10))
