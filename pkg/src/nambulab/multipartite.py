"""Tensor-product state spaces, reduced states and no-signaling checks."""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations

import numpy as np

from .brackets import lie_nambu
from .functionals import (
    Functional,
    casimir,
    linear_observable,
    quadratic_observable,
    renyi_a,
)
from .matrixcore import MatrixError, as_square, random_density, random_hermitian


@dataclass(frozen=True, eq=False)
class MultipartiteState:
    dims: tuple
    rho: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        rho = as_square(self.rho, "multipartite state")
        if math.prod(self.dims) != rho.shape[0]:
            raise MatrixError(f"dims {self.dims} do not multiply to {rho.shape[0]}")
        object.__setattr__(self, "rho", rho)


def tensor_product(rho_1, rho_2) -> MultipartiteState:
    rho_1, rho_2 = as_square(rho_1), as_square(rho_2)
    return MultipartiteState((rho_1.shape[0], rho_2.shape[0]), np.kron(rho_1, rho_2))


def partial_trace(state: MultipartiteState, keep) -> np.ndarray:
    """Reduced density matrix on the slots in ``keep`` (kept in ascending order)."""
    dims = state.dims
    keep = sorted({int(k) for k in np.atleast_1d(keep)})
    if not keep or keep[0] < 0 or keep[-1] >= len(dims):
        raise IndexError(f"keep must be a nonempty subset of slots 0..{len(dims) - 1}, got {keep}")
    n = len(dims)
    t = state.rho.reshape(dims + dims)
    letters = "abcdefghijklmnopqrstuvwxyz"
    row = list(letters[:n])
    col = list(letters[n : 2 * n])
    for j in range(n):
        if j not in keep:
            col[j] = row[j]
    out = "".join(row[j] for j in keep) + "".join(col[j] for j in keep)
    red = np.einsum("".join(row) + "".join(col) + "->" + out, t)
    dk = math.prod(dims[j] for j in keep)
    return red.reshape(dk, dk)


def lift_local(A, slot: int, dims) -> np.ndarray:
    """``1 x ... x A x ... x 1`` with ``A`` in position ``slot``."""
    A = as_square(A)
    dims = tuple(dims)
    if A.shape[0] != dims[slot]:
        raise MatrixError(f"operator of dim {A.shape[0]} does not fit slot {slot} of {dims}")
    out = np.ones((1, 1), dtype=complex)
    for j, d in enumerate(dims):
        out = np.kron(out, A if j == slot else np.eye(d))
    return out


def local_functional(F: Functional, slot: int, dims) -> Functional:
    """``F^I[rho] = F[Tr_rest rho]``; its gradient is ``lift(grad F, slot)``."""
    dims = tuple(dims)

    def reduce(rho):
        return partial_trace(MultipartiteState(dims, rho), [slot])

    return Functional(
        "local",
        {"slot": slot, "dims": dims, "inner": F},
        lambda r: F.value(reduce(r)),
        lambda r: lift_local(F.gradient(reduce(r)), slot, dims),
    )


def split_hamiltonian(H_1, H_2, dims) -> Functional:
    dims = tuple(dims)
    if len(dims) != 2:
        raise ValueError("split_hamiltonian needs exactly two slots")
    return linear_observable(lift_local(H_1, 0, dims) + lift_local(H_2, 1, dims))


def _local_family(rng: np.random.Generator, d: int) -> Functional:
    A = random_hermitian(d, seed=int(rng.integers(2**31)))
    return quadratic_observable(A) if rng.random() < 0.5 else linear_observable(A)


def _global_family(rng: np.random.Generator, D: int) -> Functional:
    if rng.random() < 0.5:
        return linear_observable(random_hermitian(D, seed=int(rng.integers(2**31))))
    return renyi_a(3.0)


def nosignal_bracket_test(dims, trials: int = 100, seed: int = 0, overlap: bool = False) -> float:
    """Max ``|[F^I, G^II, K]|`` over seeded local functionals and entangled states.

    With ``overlap=True`` both local functionals act on slot 0 (control case,
    where the bracket is generically nonzero).
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    dims = tuple(dims)
    D = math.prod(dims)
    rng = np.random.default_rng(seed)
    slot_g = 0 if overlap else 1
    worst = 0.0
    for _ in range(trials):
        F = local_functional(_local_family(rng, dims[0]), 0, dims)
        G = local_functional(_local_family(rng, dims[slot_g]), slot_g, dims)
        K = _global_family(rng, D)
        rho = random_density(D, seed=int(rng.integers(2**31)))
        worst = max(worst, abs(lie_nambu(F, G, K, rho)))
    return worst


def subsystem_generator_test(dims, H_1, H_2, S: Functional, seed: int = 0, trials: int = 20, coupling=None) -> float:
    """Max ``|[F^I, H, S] - [F^I, H^I, S]|`` for split ``H = H^I + H^II``.

    ``coupling`` (a full-space Hermitian matrix) is added to the total
    Hamiltonian only; used as a control probe.
    """
    dims = tuple(dims)
    D = math.prod(dims)
    H_total = split_hamiltonian(H_1, H_2, dims)
    if coupling is not None:
        H_total = H_total + linear_observable(coupling)
    H_local = linear_observable(lift_local(H_1, 0, dims))
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        F = local_functional(_local_family(rng, dims[0]), 0, dims)
        rho = random_density(D, seed=int(rng.integers(2**31)))
        gap = lie_nambu(F, H_total, S, rho) - lie_nambu(F, H_local, S, rho)
        worst = max(worst, abs(gap))
    return worst


def nosignal_report(dims, trials: int = 100, seed: int = 0) -> dict:
    """JSON-ready summary for the ``nosignal`` command."""
    dims = tuple(int(d) for d in dims)
    rng = np.random.default_rng(seed)
    H_1 = random_hermitian(dims[0], seed=int(rng.integers(2**31)))
    H_2 = random_hermitian(dims[1], seed=int(rng.integers(2**31)))
    gap = max(
        subsystem_generator_test(dims, H_1, H_2, S, seed=seed, trials=max(1, trials // 5))
        for S in (casimir(2) / 2, renyi_a(3.0))
    )
    return {
        "dims": list(dims),
        "trials": int(trials),
        "max_bracket": nosignal_bracket_test(dims, trials, seed),
        "max_generator_gap": gap,
        "seed": int(seed),
    }


def _parity(perm) -> int:
    perm = list(perm)
    sign = 1
    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            sign = -sign
    return sign


def antisymmetrize(psi) -> np.ndarray:
    """Projection onto the totally antisymmetric subspace (alternating mean over permutations)."""
    psi = np.asarray(psi, dtype=complex)
    if len(set(psi.shape)) > 1:
        raise ValueError(f"antisymmetrize needs equal slot dimensions, got {psi.shape}")
    N = psi.ndim
    out = np.zeros_like(psi)
    for perm in permutations(range(N)):
        out += _parity(perm) * psi.transpose(perm)
    return out / math.factorial(N)
