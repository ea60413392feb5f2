"""Fixed-step integration of ``d rho/dt = -i [grad H, grad S]``.

Two steppers:

* ``step_rk4`` -- classical Runge-Kutta on the matrix ODE, re-hermitized.
* ``step_isospectral`` -- the flow is written in Lax form
  ``d rho/dt = [B(rho), rho]`` with anti-Hermitian ``B`` and advanced by
  unitary conjugation, using 4th-order Runge-Kutta-Munthe-Kaas on the Lie
  algebra. The spectrum is preserved to rounding by construction.
"""
from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field

import numpy as np

from .brackets import nambu_rhs
from .functionals import Functional, renyi_a
from .matrixcore import NonFiniteError, as_square, commutator, eig_hermitian, hermitize, matrix_power, trace_power

DEGENERACY_RTOL = 1e-9
RK4_PSD_ATOL = 1e-8


class UnsupportedGeneratorError(ValueError):
    """The isospectral stepper needs ``grad S`` to be a spectral function of rho."""


class IntegrationError(ArithmeticError):
    def __init__(self, step: int, message: str):
        super().__init__(f"step {step}: {message}")
        self.step = step


@dataclass(frozen=True)
class EvolutionSpec:
    H: Functional
    S: Functional
    t_end: float
    dt: float
    method: str = "isospectral"

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not self.t_end >= 0:
            raise ValueError(f"t_end must be non-negative, got {self.t_end}")
        if self.method not in ("rk4", "isospectral"):
            raise ValueError(f"method must be 'rk4' or 'isospectral', got {self.method!r}")


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    diagnostics: dict = field(default_factory=dict)
    spec: EvolutionSpec | None = None

    def __len__(self):
        return len(self.times)

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


def step_rk4(rho, dt: float, H: Functional, S: Functional) -> np.ndarray:
    def f(r):
        return nambu_rhs(H, S, r)

    k1 = f(rho)
    k2 = f(rho + 0.5 * dt * k1)
    k3 = f(rho + 0.5 * dt * k2)
    k4 = f(rho + dt * k3)
    return _sym(rho + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4))


def _sym(M):
    # unchecked hermitization; non-finite values are caught by ``evolve``
    return 0.5 * (M + M.conj().T)


def lax_generator(rho, H: Functional, S: Functional) -> np.ndarray:
    """Anti-Hermitian ``B`` with ``[B, rho] = -i [grad H, grad S]``.

    In the eigenbasis of rho, ``B_jk = -i H'_jk (phi(p_k) - phi(p_j)) / (p_k - p_j)``;
    near-degenerate pairs get 0. Diagonal entries commute with rho and take the
    limit ``phi'(p_j)``, so ``phi = id`` gives ``B = -i H'`` exactly.
    """
    if S.profile is None:
        raise UnsupportedGeneratorError(
            f"generator of kind {S.kind!r} has no spectral profile; use method='rk4'"
        )
    p, V = eig_hermitian(rho)
    profile = S.profile(rho)
    phi = np.real(profile(p))
    h = V.conj().T @ H.gradient(rho) @ V
    dp = p[None, :] - p[:, None]
    dphi = phi[None, :] - phi[:, None]
    tol = DEGENERACY_RTOL * max(1.0, float(np.abs(p).max()))
    live = np.abs(dp) > tol
    ratio = np.zeros_like(dp)
    ratio[live] = dphi[live] / dp[live]
    ratio[np.diag_indices_from(ratio)] = _slope(profile, p)
    B = -1j * h * ratio
    B = 0.5 * (B - B.conj().T)
    return V @ B @ V.conj().T


def _slope(phi, p, h=1e-20):
    # complex-step derivative: exact to rounding, no cancellation
    return np.imag(phi(p + 1j * h)) / h


def _unitary(theta: np.ndarray) -> np.ndarray:
    # theta anti-Hermitian: exp(theta) = V exp(-i w) V^dagger with i*theta = V w V^dagger
    w, V = np.linalg.eigh(0.5 * (1j * theta + (1j * theta).conj().T))
    return (V * np.exp(-1j * w)) @ V.conj().T


def _conjugate(theta, rho):
    U = _unitary(theta)
    return _sym(U @ rho @ U.conj().T)


def _dexpinv(theta, A):
    c1 = commutator(theta, A)
    return A - 0.5 * c1 + commutator(theta, c1) / 12.0


def step_isospectral(rho, dt: float, H: Functional, S: Functional) -> np.ndarray:
    """One RKMK4 step; the update is ``U rho U^dagger`` with ``U`` unitary."""
    k1 = dt * lax_generator(rho, H, S)
    th = 0.5 * k1
    k2 = dt * _dexpinv(th, lax_generator(_conjugate(th, rho), H, S))
    th = 0.5 * k2
    k3 = dt * _dexpinv(th, lax_generator(_conjugate(th, rho), H, S))
    th = k3
    k4 = dt * _dexpinv(th, lax_generator(_conjugate(th, rho), H, S))
    theta = (k1 + 2 * k2 + 2 * k3 + k4) / 6.0
    return _conjugate(theta, rho)


def linear_reference(rho0, H_hat, t: float) -> np.ndarray:
    """``exp(-i H t) rho0 exp(i H t)`` via the spectral exponential."""
    w, V = eig_hermitian(H_hat)
    U = (V * np.exp(-1j * w * t)) @ V.conj().T
    return hermitize(U @ np.asarray(rho0, dtype=complex) @ U.conj().T)


def observable_rate(F_hat, H_hat, rho, alpha: float) -> float:
    """``dF/dt`` for linear ``F = Tr(F_hat rho)`` under ``H = Tr(H_hat rho)``, ``S = renyi_a(alpha)``.

    ``i dF/dt = c Tr(rho^(alpha-1) [F_hat, H_hat])`` with
    ``c = (Tr rho^alpha)^(1/(alpha-1) - 1) / (Tr rho)^(1/(alpha-1) - 1)``.
    """
    if not alpha > 1:
        raise ValueError(f"alpha must exceed 1, got {alpha}")
    rho = as_square(rho)
    p = np.linalg.eigvalsh(rho)
    ta = float(np.sum(np.where(p > 1e-12, np.clip(p, 0, None), 0.0) ** alpha))
    t1 = float(np.trace(rho).real)
    expo = 1.0 / (alpha - 1.0) - 1.0
    c = ta**expo / t1**expo
    z = -1j * c * np.trace(matrix_power(rho, alpha - 1) @ commutator(F_hat, H_hat))
    return float(z.real)


_STEPPERS = {"rk4": step_rk4, "isospectral": step_isospectral}


def evolve(rho0, spec: EvolutionSpec) -> Trajectory:
    """Integrate from ``rho0`` with fixed steps, recording diagnostics at every step."""
    rho = hermitize(rho0)
    n_steps = int(round(spec.t_end / spec.dt))
    step = _STEPPERS[spec.method]
    d = rho.shape[0]
    states = np.empty((n_steps + 1, d, d), dtype=complex)
    states[0] = rho
    for k in range(1, n_steps + 1):
        try:
            rho = step(rho, spec.dt, spec.H, spec.S)
        except (NonFiniteError, np.linalg.LinAlgError) as exc:
            raise IntegrationError(k, f"integration failed: {exc}") from exc
        if not np.all(np.isfinite(rho)):
            raise IntegrationError(k, "state became non-finite")
        states[k] = rho
    traj = Trajectory(np.arange(n_steps + 1) * spec.dt, states, spec=spec)
    traj.diagnostics = _diagnostics(traj)
    if spec.method == "rk4":
        pmin = traj.diagnostics["eigenvalues"][:, 0].min()
        if pmin < -RK4_PSD_ATOL:
            warnings.warn(f"RK4 state left the PSD cone (min eigenvalue {pmin:.3g}); reduce dt")
    return traj


def _diagnostics(traj: Trajectory) -> dict:
    spec = traj.spec
    states = traj.states
    n = len(traj)
    r2 = states @ states
    powers = (states, r2, r2 @ states, r2 @ r2)
    casimirs = np.stack([np.trace(P, axis1=1, axis2=2) for P in powers], axis=1)
    if np.abs(casimirs.imag).max() > 1e-12 * max(1.0, np.abs(casimirs.real).max()):
        raise ArithmeticError("Casimir diagnostics have a non-negligible imaginary part")
    out = {
        "C": casimirs.real,
        "eigenvalues": np.linalg.eigvalsh(states),
        "S": np.full(n, np.nan),
        "H": np.full(n, np.nan),
        "linear_deviation": np.full(n, np.nan),
    }
    if spec is None:
        return out
    out["S"] = np.array([spec.S.value(r) for r in states])
    out["H"] = np.array([spec.H.value(r) for r in states])
    if spec.H.kind == "linear":
        w, V = eig_hermitian(spec.H.params["matrix"])
        rho0 = V.conj().T @ states[0] @ V
        phase = np.exp(-1j * np.outer(traj.times, w))
        ref = phase[:, :, None] * rho0[None] * phase.conj()[:, None, :]
        ref = V[None] @ ref @ V.conj().T[None]
        out["linear_deviation"] = np.abs(states - ref).max(axis=(1, 2))
    return out


def diagnostics_table(traj: Trajectory) -> dict:
    """Column name -> array, in CSV schema order."""
    diag = traj.diagnostics or _diagnostics(traj)
    cols = {"t": traj.times}
    for k in range(4):
        cols[f"C{k + 1}"] = diag["C"][:, k]
    for j in range(diag["eigenvalues"].shape[1]):
        cols[f"p_{j + 1}"] = diag["eigenvalues"][:, j]
    cols["S_value"] = diag["S"]
    cols["H_value"] = diag["H"]
    cols["linear_deviation"] = diag["linear_deviation"]
    return cols


def drift_report(traj: Trajectory) -> dict:
    diag = traj.diagnostics
    return {
        "casimir_drift": float(np.abs(diag["C"] - diag["C"][0]).max()),
        "eigenvalue_drift": float(np.abs(diag["eigenvalues"] - diag["eigenvalues"][0]).max()),
        "energy_drift": float(np.abs(diag["H"] - diag["H"][0]).max()),
        "max_linear_deviation": float(np.nanmax(diag["linear_deviation"]))
        if np.any(np.isfinite(diag["linear_deviation"]))
        else None,
        "min_eigenvalue": float(diag["eigenvalues"][:, 0].min()),
    }


def write_csv(traj: Trajectory, path) -> None:
    cols = diagnostics_table(traj)
    names = list(cols)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(names)
        for i in range(len(traj)):
            w.writerow([format(float(cols[c][i]), ".17g") for c in names])


def read_csv(path) -> dict:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], np.array(rows[1:], dtype=float)
    return {name: body[:, j] for j, name in enumerate(header)}


def renyi_spec(H_hat, alpha: float, t_end: float, dt: float, method: str = "isospectral") -> EvolutionSpec:
    from .functionals import linear_observable

    return EvolutionSpec(linear_observable(H_hat), renyi_a(alpha), t_end, dt, method)
