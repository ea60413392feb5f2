"""Nonlinear density-matrix dynamics generated by a triple (Nambu) bracket.

Modules:

* ``matrixcore`` -- Hermitian/density-matrix validation and spectral helpers
* ``functionals`` -- functionals of rho with gradients (Casimirs, Renyi generators)
* ``brackets`` -- Lie-Poisson and Lie-Nambu brackets, su(d) structure tensors
* ``dynamics`` -- RK4 and isospectral integrators with drift diagnostics
* ``multipartite`` -- partial traces and no-signaling checks
* ``dirac`` -- two-spinor Dirac equation in momentum space
* ``cli`` -- the ``nambulab`` command
"""
from .brackets import lie_nambu, lie_poisson, nambu_rhs, structure_tensor
from .dynamics import EvolutionSpec, Trajectory, evolve, linear_reference, renyi_spec
from .functionals import (
    Functional,
    casimir,
    casimir_function,
    gradient_check,
    linear_observable,
    quadratic_observable,
    renyi_a,
    renyi_b,
)
from .matrixcore import random_density, random_hermitian
from .multipartite import MultipartiteState, partial_trace, tensor_product

__version__ = "0.1.0"

__all__ = [
    "EvolutionSpec",
    "Functional",
    "MultipartiteState",
    "Trajectory",
    "casimir",
    "casimir_function",
    "evolve",
    "gradient_check",
    "lie_nambu",
    "lie_poisson",
    "linear_observable",
    "linear_reference",
    "nambu_rhs",
    "partial_trace",
    "quadratic_observable",
    "random_density",
    "random_hermitian",
    "renyi_a",
    "renyi_b",
    "renyi_spec",
    "structure_tensor",
    "tensor_product",
]
