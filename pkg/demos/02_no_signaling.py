"""
Subsystems and no-signaling
===========================

Local observables of two subsystems have vanishing triple brackets with any
third functional, so a local Hamiltonian on one side cannot be detected on
the other, even with a nonlinear generator S.
"""
import numpy as np

from nambulab import MultipartiteState, casimir, partial_trace, random_density, random_hermitian, renyi_a
from nambulab.multipartite import nosignal_bracket_test, subsystem_generator_test

bell = np.zeros(4)
bell[[0, 3]] = 1 / np.sqrt(2)
rho = np.outer(bell, bell)
print("Bell state marginal:\n", partial_trace(MultipartiteState((2, 2), rho), [0]).real)

for dims in ((2, 2), (2, 3), (3, 3)):
    worst = nosignal_bracket_test(dims, trials=100, seed=0)
    print(f"dims {dims}: max |[F^I, G^II, K]| over 100 trials = {worst:.1e}")

print("control, both functionals on slot 0:", f"{nosignal_bracket_test((2, 2), trials=20, overlap=True):.2f}")

H1, H2 = random_hermitian(2, seed=4), random_hermitian(3, seed=5)
for name, S in (("Tr rho^2 / 2", casimir(2) / 2), ("renyi_a(3)", renyi_a(3))):
    gap = subsystem_generator_test((2, 3), H1, H2, S)
    print(f"S = {name}: H^II drops out of subsystem I dynamics, gap {gap:.1e}")

coupling = np.kron(random_hermitian(2, seed=6), random_hermitian(3, seed=7))
gap = subsystem_generator_test((2, 3), H1, H2, renyi_a(3), coupling=coupling)
print(f"with an interaction term the gap is {gap:.2f}")

rho = random_density(6, seed=8)
print("partial trace keeps the trace:", np.trace(partial_trace(MultipartiteState((2, 3), rho), [1])).real)
