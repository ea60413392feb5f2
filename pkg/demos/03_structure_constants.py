"""
Brackets in components
======================

In an orthonormal Hermitian basis of d x d matrices the bracket becomes a
contraction with real structure constants Omega_abc = -i Tr(T_a [T_b, T_c]).
"""
import numpy as np

from nambulab import lie_nambu, linear_observable, quadratic_observable, random_density, random_hermitian, renyi_a
from nambulab.brackets import (
    bracket_via_tensor,
    casimir_via_tensor,
    cyclic_trace_tensor,
    jacobi_residual,
    structure_tensor,
)

T2 = structure_tensor(2)
print("su(2) block of Omega (basis sigma/sqrt2), entry [x,y,z]:", T2.omega_lower[1, 2, 3])

for d in (2, 3, 4):
    T = structure_tensor(d)
    print(f"d={d}: {d * d} basis matrices, Jacobi residual {jacobi_residual(T):.1e}")

# the same bracket, matrix form vs component form
T3 = structure_tensor(3)
rho = random_density(3, seed=0)
F, G, S = linear_observable(np.diag([1.0, 0.0, -1.0])), quadratic_observable(random_hermitian(3, 1)), renyi_a(2.5)
print("matrix form:   ", lie_nambu(F, G, S, rho))
print("component form:", bracket_via_tensor(F, G, S, rho, T3))

# Casimirs as contractions with a cyclic trace tensor
C3 = cyclic_trace_tensor(3, 3)
print("Tr rho^3:", np.trace(rho @ rho @ rho).real, "via tensor:", casimir_via_tensor(C3, rho))
