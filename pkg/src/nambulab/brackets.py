"""Lie-Poisson and Lie-Nambu brackets on functionals of a density matrix.

Conventions: brackets are real, carry a ``-i`` prefactor, and generate the
flow ``d rho/dt = -i [grad H, grad S]``. With ``S = C_2 / 2`` and linear
``H = Tr(A rho)`` this is the von Neumann equation ``i d rho/dt = [A, rho]``.

The tensor forms use the orthonormal Hermitian basis (normalized identity
followed by generalized Gell-Mann matrices over sqrt 2), for which the
pairwise-trace metric is the identity.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations

import numpy as np

from .functionals import Functional
from .matrixcore import MatrixError, as_square, commutator

IMAG_ATOL = 1e-12


def _real(z: complex, scale: float = 1.0) -> float:
    if abs(z.imag) > IMAG_ATOL * max(1.0, scale):
        raise ArithmeticError(f"bracket has imaginary residue {z.imag:.3g}")
    return float(z.real)


def _same_dim(*mats):
    shapes = {m.shape for m in mats}
    if len(shapes) != 1:
        raise MatrixError(f"dimension mismatch: {sorted(shapes)}")


def lie_poisson(F: Functional, G: Functional, rho) -> float:
    """``{F, G} = -i Tr(rho [grad F, grad G])``."""
    rho = as_square(rho)
    a, b = F.gradient(rho), G.gradient(rho)
    _same_dim(rho, a, b)
    z = -1j * np.trace(rho @ commutator(a, b))
    return _real(z, np.abs(rho).max() * np.abs(a).max() * np.abs(b).max())


def nambu_trace(a, b, c) -> float:
    """``-i Tr(a [b, c])`` for Hermitian ``a, b, c``; totally antisymmetric."""
    _same_dim(a, b, c)
    z = -1j * np.trace(a @ commutator(b, c))
    return _real(z, np.abs(a).max() * np.abs(b).max() * np.abs(c).max())


def lie_nambu(F: Functional, G: Functional, H: Functional, rho) -> float:
    """``[F, G, H] = -i Tr(grad F [grad G, grad H])`` evaluated at ``rho``."""
    rho = as_square(rho)
    return nambu_trace(F.gradient(rho), G.gradient(rho), H.gradient(rho))


def nambu_rhs(H: Functional, S: Functional, rho) -> np.ndarray:
    """Right-hand side ``-i [grad H, grad S]`` of ``d rho/dt = [rho, H, S]``."""
    gh, gs = H.gradient(rho), S.gradient(rho)
    _same_dim(rho, gh, gs)
    out = -1j * commutator(gh, gs)
    return 0.5 * (out + out.conj().T)


class WaveFunctional:
    """A functional of (psi, conj psi) with Wirtinger derivatives.

    ``wirtinger(psi)`` returns ``(dF/dpsi, dF/dconj(psi))``.
    """

    def __init__(self, value, wirtinger):
        self._value = value
        self._wirtinger = wirtinger

    def value(self, psi) -> float:
        return float(self._value(np.asarray(psi, dtype=complex)))

    def wirtinger(self, psi):
        return self._wirtinger(np.asarray(psi, dtype=complex))

    @classmethod
    def induced(cls, F: Functional) -> WaveFunctional:
        """Pull a density-matrix functional back along ``rho = psi psi^dagger``."""

        def rho_of(psi):
            return np.outer(psi, psi.conj())

        def wirtinger(psi):
            g = F.gradient(rho_of(psi))
            return psi.conj() @ g, g @ psi

        return cls(lambda psi: F.value(rho_of(psi)), wirtinger)

    @classmethod
    def norm_squared(cls) -> WaveFunctional:
        return cls(lambda psi: np.vdot(psi, psi).real, lambda psi: (psi.conj(), psi))


def pure_state_bracket(F: WaveFunctional, G: WaveFunctional, psi) -> float:
    """Canonical bracket ``-i sum_k (dF/dpsi_k dG/dconj_k - dG/dpsi_k dF/dconj_k)``."""
    psi = np.asarray(psi, dtype=complex).ravel()
    f_psi, f_bar = F.wirtinger(psi)
    g_psi, g_bar = G.wirtinger(psi)
    z = -1j * (f_psi @ g_bar - g_psi @ f_bar)
    return _real(z, float(np.vdot(psi, psi).real) + 1.0)


# --- explicit tensors -------------------------------------------------------


def hermitian_basis(d: int) -> np.ndarray:
    """Orthonormal Hermitian basis of d x d matrices, ``Tr(T_a T_b) = delta_ab``.

    Order: identity/sqrt(d), then for each pair j < k the symmetric and the
    antisymmetric Gell-Mann element, then the d-1 diagonal ones. For d = 2
    this is ``(1, sigma_x, sigma_y, sigma_z) / sqrt 2``.
    """
    basis = [np.eye(d, dtype=complex) / np.sqrt(d)]
    for j in range(d):
        for k in range(j + 1, d):
            s = np.zeros((d, d), dtype=complex)
            s[j, k] = s[k, j] = 1
            a = np.zeros((d, d), dtype=complex)
            a[j, k], a[k, j] = -1j, 1j
            basis += [s / np.sqrt(2), a / np.sqrt(2)]
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1
        diag[l] = -l
        basis.append(np.diag(diag * np.sqrt(1.0 / (l * (l + 1)))).astype(complex))
    return np.array(basis)


def components(T: np.ndarray, M) -> np.ndarray:
    """Real expansion coefficients ``m_a = Tr(T_a M)`` of a Hermitian matrix."""
    return np.einsum("aij,ji->a", T, np.asarray(M)).real


@dataclass(frozen=True, eq=False)
class StructureTensor:
    d: int
    basis: np.ndarray
    g_lower: np.ndarray
    g_upper: np.ndarray
    omega_lower: np.ndarray
    omega_mixed: np.ndarray


@lru_cache(maxsize=None)
def _structure_tensor(d: int) -> StructureTensor:
    T = hermitian_basis(d)
    g_lower = np.einsum("aij,bji->ab", T, T).real
    g_upper = np.linalg.inv(g_lower)
    comm = np.einsum("bij,cjk->bcik", T, T)
    comm = comm - comm.transpose(1, 0, 2, 3)
    omega_c = -1j * np.einsum("aki,bcik->abc", T, comm)
    if np.abs(omega_c.imag).max() > 1e-12:
        raise ArithmeticError("structure constants are not real")
    omega_lower = omega_c.real
    omega_mixed = np.einsum("ad,dbc->abc", g_upper, omega_lower)
    for arr in (T, g_lower, g_upper, omega_lower, omega_mixed):
        arr.flags.writeable = False
    return StructureTensor(d, T, g_lower, g_upper, omega_lower, omega_mixed)


def structure_tensor(d: int) -> StructureTensor:
    """Structure constants ``Omega_abc = -i Tr(T_a [T_b, T_c])`` for 2 <= d <= 4."""
    if not 2 <= d <= 4:
        raise ValueError(f"structure_tensor supports 2 <= d <= 4, got {d}")
    return _structure_tensor(int(d))


def jacobi_residual(T: StructureTensor) -> float:
    """Max over (a, b, d, e) of the cyclic Jacobi sum of the mixed structure constants."""
    om = T.omega_mixed
    r = (
        np.einsum("abc,cde->abde", om, om)
        + np.einsum("aec,cbd->abde", om, om)
        + np.einsum("adc,ceb->abde", om, om)
    )
    return float(np.abs(r).max())


def antisymmetry_residual(T: StructureTensor) -> float:
    """Max deviation of ``Omega_abc`` from total antisymmetry, plus the lower-pair check."""
    om = T.omega_lower
    worst = float(np.abs(T.omega_mixed + T.omega_mixed.transpose(0, 2, 1)).max())
    for perm in permutations(range(3)):
        sign = np.linalg.det(np.eye(3)[list(perm)])
        worst = max(worst, float(np.abs(om.transpose(perm) - sign * om).max()))
    return worst


def metric_residual(T: StructureTensor) -> float:
    return float(np.abs(T.g_lower @ T.g_upper - np.eye(len(T.basis))).max())


def bracket_via_tensor(F: Functional, G: Functional, H: Functional, rho, T: StructureTensor) -> float:
    """Component form ``Omega_abc f^a g^b h^c`` of the Nambu bracket."""
    rho = as_square(rho)
    if rho.shape[0] != T.d:
        raise MatrixError(f"state dimension {rho.shape[0]} does not match tensor d={T.d}")
    f, g, h = (components(T.basis, X.gradient(rho)) for X in (F, G, H))
    return float(np.einsum("abc,a,b,c->", T.omega_lower, f, g, h))


@dataclass(frozen=True, eq=False)
class CyclicTraceTensor:
    d: int
    n: int
    basis: np.ndarray
    entries: np.ndarray


def cyclic_trace_tensor(d: int, n: int) -> CyclicTraceTensor:
    """``entries[a1..an] = Re Tr(T_a1 ... T_an)`` for d <= 3, n <= 4."""
    if not (1 <= d <= 3 and 1 <= n <= 4):
        raise ValueError(f"cyclic_trace_tensor supports d <= 3, n <= 4; got d={d}, n={n}")
    T = hermitian_basis(d)
    m = len(T)
    prod = T
    for _ in range(n - 1):
        prod = np.einsum("...ij,bjk->...bik", prod, T)
    entries = np.trace(prod, axis1=-2, axis2=-1).real.reshape((m,) * n)
    return CyclicTraceTensor(d, n, T, entries)


def casimir_via_tensor(Tn: CyclicTraceTensor, rho) -> float:
    rho = as_square(rho)
    if rho.shape[0] != Tn.d:
        raise MatrixError(f"state dimension {rho.shape[0]} does not match tensor d={Tn.d}")
    x = components(Tn.basis, rho)
    out = Tn.entries
    for _ in range(Tn.n):
        out = out @ x
    return float(out)
