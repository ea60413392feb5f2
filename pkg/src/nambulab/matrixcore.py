"""Dense complex-matrix substrate.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``; the
Hermitian / density-matrix "types" are contracts checked by the ``check_*``
helpers rather than wrapper classes.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

HERMITIAN_ATOL = 1e-12
PSD_ATOL = 1e-10
EIG_FLOOR = 1e-12


class MatrixError(ValueError):
    """A matrix violates one of the substrate invariants."""


class NonFiniteError(MatrixError):
    """Input contains NaN or infinity."""


class EigenError(ArithmeticError):
    """Eigendecomposition failed to converge."""

    def __init__(self, norm: float):
        super().__init__(f"eigendecomposition did not converge (max-norm {norm:.6g})")
        self.norm = norm


class Spectrum(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_square(M, name: str = "matrix") -> np.ndarray:
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
        raise MatrixError(f"{name} must be a non-empty square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise NonFiniteError(f"{name} has non-finite entries")
    return M


def check_hermitian(M, atol: float = HERMITIAN_ATOL, name: str = "matrix") -> np.ndarray:
    M = as_square(M, name)
    err = np.abs(M - M.conj().T).max()
    if err > atol:
        raise MatrixError(f"{name} is not Hermitian: max |M - M^dagger| = {err:.3g} > {atol:g}")
    return M


def check_density(rho, psd_atol: float = PSD_ATOL, name: str = "density matrix") -> np.ndarray:
    """Validate a (possibly unnormalized) density matrix and return it."""
    rho = check_hermitian(rho, name=name)
    pmin = np.linalg.eigvalsh(hermitize(rho))[0]
    if pmin < -psd_atol:
        raise MatrixError(
            f"{name} violates the PSD invariant: smallest eigenvalue {pmin:.3g} < -{psd_atol:g}"
        )
    tr = np.trace(rho).real
    if not tr > 0:
        raise MatrixError(f"{name} must have positive trace, got {tr:.6g}")
    return rho


def hermitize(M) -> np.ndarray:
    """Return the Hermitian part ``(M + M^dagger) / 2``."""
    M = as_square(M)
    return 0.5 * (M + M.conj().T)


def eig_hermitian(M) -> Spectrum:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending."""
    M = as_square(M)
    try:
        p, V = np.linalg.eigh(M)
    except np.linalg.LinAlgError as exc:
        raise EigenError(float(np.abs(M).max())) from exc
    return Spectrum(p, V)


def spectral_apply(M, fn) -> np.ndarray:
    """``V diag(fn(p)) V^dagger`` for Hermitian ``M``."""
    p, V = eig_hermitian(M)
    return (V * fn(p)) @ V.conj().T


def _floored_power(p: np.ndarray, s: float) -> np.ndarray:
    out = np.zeros_like(p)
    live = p > EIG_FLOOR
    out[live] = p[live] ** s
    return out


def matrix_power(rho, s: float) -> np.ndarray:
    """Real power of a PSD matrix.

    Eigenvalues below ``EIG_FLOOR`` are treated as exact zeros, and
    ``0**s`` is taken to be 0 for every ``s >= 0`` (so ``s = 0`` gives the
    support projector, not the identity).
    """
    if s < 0:
        raise ValueError(f"matrix_power needs s >= 0, got {s}")
    return spectral_apply(rho, lambda p: _floored_power(p, s))


def commutator(A, B) -> np.ndarray:
    A = np.asarray(A)
    B = np.asarray(B)
    if A.shape != B.shape:
        raise MatrixError(f"dimension mismatch: {A.shape} vs {B.shape}")
    return A @ B - B @ A


def trace_power(rho, n: int) -> float:
    """``Re Tr(rho**n)``; raises if the imaginary residue is not negligible."""
    if int(n) != n or n < 1:
        raise ValueError(f"trace_power needs a positive integer n, got {n}")
    rho = as_square(rho)
    t = np.trace(np.linalg.matrix_power(rho, int(n)))
    if abs(t.imag) > 1e-12 * max(1.0, abs(t.real)):
        raise ArithmeticError(f"Tr(rho^{n}) has imaginary part {t.imag:.3g}")
    return float(t.real)


def _complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def random_density(d: int, rank: int | None = None, seed: int = 0, normalize: bool = True) -> np.ndarray:
    """Seeded random state ``G G^dagger / Tr(G G^dagger)`` with ``G`` of shape (d, rank).

    Uses ``numpy.random.default_rng`` (PCG64), so outputs are stable for a
    given numpy major version.
    """
    rank = d if rank is None else rank
    if not 1 <= rank <= d:
        raise ValueError(f"rank must be in [1, {d}], got {rank}")
    G = _complex_normal(np.random.default_rng(seed), (d, rank))
    rho = hermitize(G @ G.conj().T)
    if normalize:
        rho = rho / np.trace(rho).real
    return rho


def random_hermitian(d: int, seed: int = 0) -> np.ndarray:
    return hermitize(_complex_normal(np.random.default_rng(seed), (d, d)))


def pure_density(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).ravel()
    return np.outer(psi, psi.conj())


# Matrix JSON: {"dim": d, "re": [[...]], "im": [[...]]}, row-major.

def matrix_to_json(M) -> dict:
    M = as_square(M)
    return {"dim": M.shape[0], "re": M.real.tolist(), "im": M.imag.tolist()}


def matrix_from_json(obj: dict) -> np.ndarray:
    try:
        dim = int(obj["dim"])
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise MatrixError(f"malformed matrix JSON: {exc}") from exc
    if re.shape != (dim, dim) or im.shape != (dim, dim):
        raise MatrixError(
            f"matrix JSON must be square {dim}x{dim}: got re {re.shape}, im {im.shape}"
        )
    return as_square(re + 1j * im)
