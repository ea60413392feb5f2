"""Two-spinor form of the free Dirac equation in momentum space.

Conventions (fixed once here):

* metric signature (+, -, -, -); orientation ``e^{0123} = +1`` (so
  ``e_{0123} = -1``), which makes ``*sigma = -i sigma`` and
  ``*sigma_bar = +i sigma_bar`` with ``*X_ab = (1/2) e_abcd X^cd``;
* ``eps_AB = eps^AB = [[0, 1], [-1, 0]]``, ``psi^A = eps^AB psi_B``,
  ``psi_B = psi^A eps_AB`` (same for primed indices);
* Infeld-van der Waerden symbols ``g_a^{AA'} = sigma_a / sqrt 2`` with
  ``sigma_0 = 1``;
* a plane wave ``exp(-i k.x)`` turns ``i nabla_a`` into ``k_a``.

Array index order follows the written index order, e.g. ``G[a, A, A']`` is
``g_a^{AA'}``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations

import numpy as np

SQRT2 = np.sqrt(2.0)
ETA = np.diag([1.0, -1.0, -1.0, -1.0])
EPS = np.array([[0, 1], [-1, 0]], dtype=complex)
PAULI = np.array(
    [np.eye(2), [[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=complex
)


def _levi_civita() -> np.ndarray:
    e = np.zeros((4,) * 4)
    for p in permutations(range(4)):
        e[p] = np.linalg.det(np.eye(4)[list(p)])
    return e


E_UPPER = _levi_civita()          # e^{abcd}, e^{0123} = +1
E_LOWER = -E_UPPER                # e_{abcd} = det(eta) e^{abcd}


def lower_spinor_pair(T):
    """Lower the last two spinor indices: ``T_{..AA'} = T^{..BB'} eps_BA eps_B'A'``."""
    return np.einsum("...BC,BA,CD->...AD", T, EPS, EPS)


def lower_world(T, axes=(0,)):
    for ax in axes:
        T = np.moveaxis(np.tensordot(ETA, T, axes=([1], [ax])), 0, ax)
    return T


raise_world = lower_world  # eta is its own inverse


@dataclass(frozen=True, eq=False)
class IvwSymbols:
    G: np.ndarray          # g_a^{AA'}
    G_up: np.ndarray       # g^{a AA'}
    G_low: np.ndarray      # g_{a AA'}
    G_up_low: np.ndarray   # g^a_{AA'}


@lru_cache(maxsize=None)
def ivw_symbols() -> IvwSymbols:
    G = PAULI / SQRT2
    G_up = lower_world(G)
    return IvwSymbols(G, G_up, lower_spinor_pair(G), lower_spinor_pair(G_up))


@dataclass(frozen=True, eq=False)
class SigmaGenerators:
    sigma: np.ndarray       # sigma^{ab}_X^Y
    sigma_bar: np.ndarray   # sigma_bar^{ab}_X'^Y'


def _products(g: IvwSymbols):
    unprimed = np.einsum("aXC,bYC->abXY", g.G_up_low, g.G_up)  # g^a_{XA'} g^{bYA'}
    primed = np.einsum("aCX,bCY->abXY", g.G_up_low, g.G_up)    # g^a_{AX'} g^{bAY'}
    return unprimed, primed


@lru_cache(maxsize=None)
def sigma_generators() -> SigmaGenerators:
    """Generators as antisymmetrized products of the IvW symbols."""
    unprimed, primed = _products(ivw_symbols())
    sigma = (unprimed - unprimed.transpose(1, 0, 2, 3)) / 2j
    sigma_bar = (primed - primed.transpose(1, 0, 2, 3)) / 2j
    return SigmaGenerators(sigma, sigma_bar)


def sigma_spinor_form():
    """Generators from the epsilon formulas, indexed ``[A, A', B, B', X, Y]``."""
    e = EPS
    s = (np.einsum("PQ,AX,BY->APBQXY", e, e, e) + np.einsum("PQ,BX,AY->APBQXY", e, e, e)) / 2j
    sb = (np.einsum("AB,PX,QY->APBQXY", e, e, e) + np.einsum("AB,QX,PY->APBQXY", e, e, e)) / 2j
    return s, sb


def _to_spinor_pairs(sig):
    """``sigma^{ab}_X^Y`` -> ``sigma_{AA'BB'XY}`` (world indices lowered, then soldered)."""
    g = ivw_symbols()
    low = lower_world(sig, axes=(0, 1))
    low = np.einsum("abXZ,ZY->abXY", low, EPS)
    return np.einsum("aAP,bBQ,abXY->APBQXY", g.G_up_low, g.G_up_low, low)


def dual(X):
    """``*X^{ab} = (1/2) e^{ab}_{cd} X^{cd}`` for the first two (upper world) axes."""
    lowered = 0.5 * np.einsum("abcd,cd...->ab...", E_LOWER, X)
    return lower_world(lowered, axes=(0, 1))


def spinor_identity_residuals() -> dict:
    """Componentwise residuals of every spinor identity the construction relies on."""
    g = ivw_symbols()
    sg = sigma_generators()
    unprimed, primed = _products(g)
    g_ab_delta = np.einsum("ab,XY->abXY", ETA, np.eye(2))
    s_eps, sb_eps = sigma_spinor_form()
    return {
        "ivw_unprimed": float(np.abs(unprimed + unprimed.transpose(1, 0, 2, 3) - g_ab_delta).max()),
        "ivw_primed": float(np.abs(primed + primed.transpose(1, 0, 2, 3) - g_ab_delta).max()),
        "product_unprimed": float(np.abs(unprimed - (0.5 * g_ab_delta + 1j * sg.sigma)).max()),
        "product_primed": float(np.abs(primed - (0.5 * g_ab_delta + 1j * sg.sigma_bar)).max()),
        "sigma_spinor_form": float(np.abs(_to_spinor_pairs(sg.sigma) - s_eps).max()),
        "sigma_bar_spinor_form": float(np.abs(_to_spinor_pairs(sg.sigma_bar) - sb_eps).max()),
        "duality": float(np.abs(dual(sg.sigma) + 1j * sg.sigma).max()),
        "duality_bar": float(np.abs(dual(sg.sigma_bar) - 1j * sg.sigma_bar).max()),
        "antisymmetry": float(
            max(np.abs(sg.sigma + sg.sigma.transpose(1, 0, 2, 3)).max(),
                np.abs(sg.sigma_bar + sg.sigma_bar.transpose(1, 0, 2, 3)).max())
        ),
    }


@dataclass(frozen=True, eq=False)
class SpinorMode:
    k: np.ndarray    # spatial wave vector in the frame of n
    psi: np.ndarray  # psi^A
    xi: np.ndarray   # xi_{A'}

    def __post_init__(self):
        for name, shape in (("k", (3,)), ("psi", (2,)), ("xi", (2,))):
            arr = np.asarray(getattr(self, name), dtype=float if name == "k" else complex)
            if arr.shape != shape or not np.all(np.isfinite(arr)):
                raise ValueError(f"SpinorMode.{name} must be a finite array of shape {shape}")
            object.__setattr__(self, name, arr)

    @property
    def state(self) -> np.ndarray:
        return np.concatenate([self.psi, self.xi])

    @classmethod
    def from_state(cls, k, state) -> SpinorMode:
        state = np.asarray(state, dtype=complex)
        return cls(np.asarray(k, dtype=float), state[:2], state[2:])


REST_FRAME = np.array([1.0, 0.0, 0.0, 0.0])


def check_slicing(n) -> np.ndarray:
    n = np.asarray(n, dtype=float)
    if n.shape != (4,) or n[0] <= 0 or abs(n @ ETA @ n - 1.0) > 1e-12:
        raise ValueError(f"slicing vector must be future-pointing with n.n = 1, got {n}")
    return n


def boost_to(n) -> np.ndarray:
    """Pure boost taking (1, 0, 0, 0) to ``n``."""
    n = check_slicing(n)
    gamma, u = n[0], n[1:]
    L = np.eye(4)
    L[0, 0] = gamma
    L[0, 1:] = L[1:, 0] = u
    uu = u @ u
    if uu > 0:
        L[1:, 1:] += (gamma - 1.0) * np.outer(u, u) / uu
    return L


def spinor_up(v):
    """``v^{AA'} = v^a g_a^{AA'}`` for an upper-index world vector."""
    return np.einsum("a,aXY->XY", v, ivw_symbols().G)


def spinor_low(v):
    """``v_{AA'} = v^a g_{aAA'}``."""
    return np.einsum("a,aXY->XY", v, ivw_symbols().G_low)


def four_momentum(E: float, k, n=REST_FRAME) -> np.ndarray:
    """``k^a = E n^a + q^a`` with ``q`` the spatial vector ``k`` carried into the frame of ``n``."""
    L = boost_to(n)
    return E * L[:, 0] + L @ np.concatenate([[0.0], np.asarray(k, dtype=float)])


def dirac_residual(mode: SpinorMode, E: float, m: float) -> float:
    """Residual of ``k_{AA'} psi^A = (m/sqrt2) xi_{A'}``, ``k^{AA'} xi_{A'} = (m/sqrt2) psi^A``."""
    if m < 0:
        raise ValueError("mass must be non-negative")
    k = four_momentum(E, mode.k)
    r1 = spinor_low(k).T @ mode.psi - m / SQRT2 * mode.xi
    r2 = spinor_up(k) @ mode.xi - m / SQRT2 * mode.psi
    return float(max(np.abs(r1).max(), np.abs(r2).max()))


def dirac_hamiltonian(k, m: float, n=REST_FRAME) -> np.ndarray:
    """Mode matrix ``h`` with ``(n.k) Psi = h Psi`` for ``Psi = (psi^A, xi_{A'})``.

    Splitting ``k = E n + q`` in the contracted equations, the ``n``-part of
    the right-hand side contributes ``E/2``; moving it left gives
    ``E psi^A = 2 n^{BB'} q^A_{B'} psi_B + sqrt2 m n^{AB'} xi_{B'}`` and
    ``E xi_{A'} = 2 n^{BB'} q_{BA'} xi_{B'} + sqrt2 m n_{BA'} psi^B``.
    """
    n = check_slicing(n)
    q = boost_to(n) @ np.concatenate([[0.0], np.asarray(k, dtype=float)])
    nU, nL = spinor_up(n), spinor_low(n)
    qU, qL = spinor_up(q), spinor_low(q)
    h_pp = 2 * np.einsum("BP,AP,CB->AC", nU, qU @ EPS, EPS)
    h_px = SQRT2 * m * nU
    h_xx = 2 * np.einsum("BQ,BP->PQ", nU, qL)
    h_xp = SQRT2 * m * nL.T
    return np.block([[h_pp, h_px], [h_xp, h_xx]])


def norm_metric(n=REST_FRAME) -> np.ndarray:
    """Gram matrix ``W`` with ``Psi^dagger W Psi = n^{AA'}(psi_A conj(psi)_{A'} + conj(xi)_A xi_{A'})``."""
    nU = spinor_up(check_slicing(n))
    # psi_A = psi^B eps_BA gives psi^T (eps n eps^T) conj(psi); the xi term is xi^dagger n xi.
    W = np.zeros((4, 4), dtype=complex)
    W[:2, :2] = (EPS @ nU @ EPS.T).T
    W[2:, 2:] = nU
    return 0.5 * (W + W.conj().T)


def mode_norm(modes, n=REST_FRAME) -> float:
    """Discrete mode-sum of the conserved norm; ``modes`` is a list of (SpinorMode, amplitude)."""
    W = norm_metric(n)
    total = 0.0
    for mode, amp in modes:
        s = amp * mode.state
        total += np.vdot(s, W @ s).real
    return float(total)


def _propagator(h, W, t):
    # h is W-self-adjoint: conjugate by W^(1/2) to a Hermitian matrix.
    w, V = np.linalg.eigh(W)
    root, iroot = (V * np.sqrt(w)) @ V.conj().T, (V * w**-0.5) @ V.conj().T
    hs = root @ h @ iroot
    e, U = np.linalg.eigh(0.5 * (hs + hs.conj().T))
    return iroot @ ((U * np.exp(-1j * e * t)) @ U.conj().T) @ root


def evolve_modes(modes, m: float, t: float, n=REST_FRAME):
    """Advance each (mode, amplitude) pair by ``exp(-i h t)``."""
    W = norm_metric(n)
    out = []
    for mode, amp in modes:
        P = _propagator(dirac_hamiltonian(mode.k, m, n), W, t)
        out.append((SpinorMode.from_state(mode.k, P @ mode.state), amp))
    return out


def form_equivalence_test(mode: SpinorMode, E: float, m: float, tol: float = 1e-12) -> float:
    """Residual of the rearranged equations
    ``k_a psi^A = 2 k^b *sigma_ba^A_B psi^B + sqrt2 m g_a^{AB'} xi_B'`` and
    ``k_a xi_A' = 2 k^b *sigma_bar_ba A'^B' xi_B' + sqrt2 m g_{aBA'} psi^B``.
    """
    if dirac_residual(mode, E, m) > tol:
        raise ValueError("form_equivalence_test needs a solution of the Dirac equation")
    g = ivw_symbols()
    sg = sigma_generators()
    k_up = four_momentum(E, mode.k)
    k_low = ETA @ k_up
    ds = lower_world(dual(sg.sigma), axes=(0, 1))        # *sigma_{ba X}^Y
    dsb = lower_world(dual(sg.sigma_bar), axes=(0, 1))   # *sigma_bar_{ba X'}^Y'
    ds_mixed = np.einsum("AX,baXY,YB->baAB", EPS, ds, EPS)  # *sigma_ba^A_B
    lhs1 = np.outer(k_low, mode.psi)
    rhs1 = 2 * np.einsum("b,baAB,B->aA", k_up, ds_mixed, mode.psi) + SQRT2 * m * g.G @ mode.xi
    lhs2 = np.outer(k_low, mode.xi)
    rhs2 = 2 * np.einsum("b,baPQ,Q->aP", k_up, dsb, mode.xi) + SQRT2 * m * np.einsum(
        "aBP,B->aP", g.G_low, mode.psi
    )
    return float(max(np.abs(lhs1 - rhs1).max(), np.abs(lhs2 - rhs2).max()))


def hamiltonian_function(modes_state, ks, m: float, n=REST_FRAME) -> float:
    """Discretized Hamiltonian ``sum_modes Psi^dagger W h Psi`` (real)."""
    W = norm_metric(n)
    return float(sum(np.vdot(s, W @ dirac_hamiltonian(k, m, n) @ s).real for k, s in zip(ks, modes_state)))


def hamilton_equations_check(modes, m: float, n=REST_FRAME, dt: float = 1e-6, h: float = 1e-6) -> float:
    """Compare ``i dPsi/dt`` from ``evolve_modes`` with ``I dH/dconj(Psi)``.

    The time derivative is a centered difference in ``t``; the Wirtinger
    derivative of the Hamiltonian function is a centered difference in the
    real and imaginary parts of each component. ``I`` is the inverse of the
    norm's Gram matrix.
    """
    ks = [mode.k for mode, _ in modes]
    states = [amp * mode.state for mode, amp in modes]
    fwd = evolve_modes(modes, m, dt, n)
    bwd = evolve_modes(modes, m, -dt, n)
    poisson = np.linalg.inv(norm_metric(n))
    worst = 0.0
    for j, s in enumerate(states):
        amp = modes[j][1]
        lhs = 1j * (amp * fwd[j][0].state - amp * bwd[j][0].state) / (2 * dt)
        grad = np.zeros(4, dtype=complex)
        for c in range(4):
            def H_at(delta):
                trial = list(states)
                v = s.copy()
                v[c] += delta
                trial[j] = v
                return hamiltonian_function(trial, ks, m, n)

            d_re = (H_at(h) - H_at(-h)) / (2 * h)
            d_im = (H_at(1j * h) - H_at(-1j * h)) / (2 * h)
            grad[c] = 0.5 * (d_re + 1j * d_im)
        rhs = poisson @ grad
        worst = max(worst, float(np.abs(lhs - rhs).max()))
    return worst


def dispersion_residual(k_grid, masses, n=REST_FRAME) -> float:
    worst = 0.0
    for m in masses:
        for k in k_grid:
            E = np.linalg.eigvals(dirac_hamiltonian(k, m, n))
            worst = max(worst, float(np.abs(E**2 - (np.dot(k, k) + m * m)).max()))
    return worst


def k_grid_27(scale: float = 1.0) -> np.ndarray:
    axis = np.array([-1.0, 0.0, 1.0]) * scale
    return np.array([[x, y, z] for x in axis for y in axis for z in axis])


def eigenmodes(k, m: float, n=REST_FRAME):
    """Eigenpairs ``(E_j, SpinorMode_j)`` of the mode matrix, ascending in E (rest frame: orthonormal)."""
    h = dirac_hamiltonian(k, m, n)
    W = norm_metric(n)
    w, V = np.linalg.eigh(W)
    root, iroot = (V * np.sqrt(w)) @ V.conj().T, (V * w**-0.5) @ V.conj().T
    hs = root @ h @ iroot
    E, U = np.linalg.eigh(0.5 * (hs + hs.conj().T))
    vecs = iroot @ U
    return [(float(E[j]), SpinorMode.from_state(k, vecs[:, j])) for j in range(4)]
