"""Scalar functionals F[rho] together with their gradients dF/drho.

The gradient convention is ``dF = Tr(gradient(rho) @ Delta)`` for a
Hermitian perturbation ``Delta``, so gradients are Hermitian matrices.

Functionals whose gradient is a spectral function of ``rho`` (plus a
multiple of the identity) carry a ``profile``: a callable mapping ``rho``
to a scalar function ``phi`` with ``gradient(rho) = phi(rho) + c * 1``.
The isospectral integrator needs it. ``phi`` must accept complex arrays so
that its slope can be taken by complex-step differentiation.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .matrixcore import EIG_FLOOR, as_square, eig_hermitian, random_hermitian

Matrix = np.ndarray
Profile = Callable[[Matrix], Callable[[np.ndarray], np.ndarray]]


class DegenerateStateError(ArithmeticError):
    pass


@dataclass(frozen=True, eq=False)
class Functional:
    kind: str
    params: dict
    _value: Callable[[Matrix], float] = field(repr=False)
    _gradient: Callable[[Matrix], Matrix] = field(repr=False)
    profile: Profile | None = field(default=None, repr=False)

    def value(self, rho) -> float:
        return float(self._value(np.asarray(rho, dtype=complex)))

    def gradient(self, rho) -> Matrix:
        return self._gradient(np.asarray(rho, dtype=complex))

    __call__ = value

    def __add__(self, other: Functional) -> Functional:
        profile = None
        if self.profile is not None and other.profile is not None:
            p1, p2 = self.profile, other.profile

            def profile(rho):
                f1, f2 = p1(rho), p2(rho)
                return lambda p: f1(p) + f2(p)

        return Functional(
            "composite",
            {"op": "sum", "terms": (self, other)},
            lambda r: self._value(r) + other._value(r),
            lambda r: self._gradient(r) + other._gradient(r),
            profile,
        )

    def __mul__(self, c: float) -> Functional:
        c = float(c)
        profile = None
        if self.profile is not None:
            p0 = self.profile

            def profile(rho):
                f = p0(rho)
                return lambda p: c * f(p)

        return Functional(
            "composite",
            {"op": "scale", "factor": c, "term": self},
            lambda r: c * self._value(r),
            lambda r: c * self._gradient(r),
            profile,
        )

    __rmul__ = __mul__

    def __truediv__(self, c: float) -> Functional:
        return self * (1.0 / c)

    def __neg__(self) -> Functional:
        return self * -1.0

    def __sub__(self, other: Functional) -> Functional:
        return self + (-other)


def product(F: Functional, G: Functional) -> Functional:
    """Pointwise product ``F[rho] * G[rho]`` (Leibniz gradient)."""
    return Functional(
        "composite",
        {"op": "product", "terms": (F, G)},
        lambda r: F._value(r) * G._value(r),
        lambda r: F._value(r) * G._gradient(r) + G._value(r) * F._gradient(r),
    )


def linear_observable(A) -> Functional:
    """``H[rho] = Tr(A rho)`` with constant gradient ``A``."""
    A = as_square(A, "observable")
    return Functional(
        "linear",
        {"matrix": A},
        lambda r: np.trace(A @ r).real,
        lambda r: A,
    )


def quadratic_observable(A) -> Functional:
    """``F[rho] = Tr((A rho)^2)``, gradient ``2 A rho A``."""
    A = as_square(A, "observable")
    return Functional(
        "quadratic",
        {"matrix": A},
        lambda r: np.trace(A @ r @ A @ r).real,
        lambda r: 2.0 * A @ r @ A,
    )


def _int_power(rho: Matrix, k: int) -> Matrix:
    if k == 0:
        return np.eye(rho.shape[0], dtype=complex)
    return np.linalg.matrix_power(rho, k)


def casimir(n: int) -> Functional:
    """``C_n[rho] = Tr(rho^n)``, gradient ``n rho^(n-1)``."""
    if int(n) != n or n < 1:
        raise ValueError(f"casimir order must be a positive integer, got {n}")
    n = int(n)
    return Functional(
        "casimir",
        {"n": n},
        lambda r: np.trace(_int_power(r, n)).real,
        lambda r: n * _int_power(r, n - 1),
        lambda r: (lambda p: n * p ** (n - 1)),
    )


def _floored(p: np.ndarray, s: float) -> np.ndarray:
    # accepts complex p (complex-step derivatives); the floor acts on the real part
    keep = np.real(p) > EIG_FLOOR
    return np.where(keep, np.where(keep, p, 1.0) ** s, 0.0)


def _renyi_parts(rho: Matrix, alpha: float):
    """Return (Tr rho^alpha, Tr rho, rho^(alpha-1)).

    Integer alpha uses repeated products; otherwise one eigendecomposition
    with the eigenvalue floor.
    """
    if float(alpha).is_integer():
        power = _int_power(rho, int(alpha) - 1)
        t_alpha = float(np.trace(power @ rho).real)
        t_one = float(np.trace(rho).real)
    else:
        p, V = eig_hermitian(rho)
        t_alpha = float(np.sum(_floored(p, alpha)))
        t_one = float(np.sum(p))
        power = (V * _floored(p, alpha - 1)) @ V.conj().T
    if t_alpha <= 0:
        raise DegenerateStateError("Tr(rho^alpha) vanishes; Renyi generator undefined")
    if t_one <= 0:
        raise DegenerateStateError(f"Tr(rho) must be positive, got {t_one:.3g}")
    return t_alpha, t_one, power


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not alpha > 1:
        raise ValueError(f"Renyi generators need alpha > 1, got {alpha}")
    return alpha


def _renyi(kind: str, alpha: float, prefactor: float) -> Functional:
    # S = prefactor * Ta^beta * T1^(1 - beta) with beta = 1/(alpha - 1);
    # homogeneous of degree 2 in rho.
    beta = 1.0 / (alpha - 1.0)

    def value(r):
        ta, t1, _ = _renyi_parts(r, alpha)
        return prefactor * ta**beta * t1 ** (1.0 - beta)

    def coefficients(ta, t1):
        c_power = prefactor * beta * alpha * ta ** (beta - 1.0) * t1 ** (1.0 - beta)
        c_ident = prefactor * (1.0 - beta) * ta**beta * t1 ** (-beta)
        return c_power, c_ident

    def gradient(r):
        ta, t1, power = _renyi_parts(r, alpha)
        c_power, c_ident = coefficients(ta, t1)
        return c_power * power + c_ident * np.eye(r.shape[0])

    def profile(r):
        ta, t1, _ = _renyi_parts(r, alpha)
        c_power, _ = coefficients(ta, t1)
        return lambda p: c_power * _floored(np.asarray(p), alpha - 1)

    return Functional(kind, {"alpha": alpha}, value, gradient, profile)


def renyi_a(alpha: float) -> Functional:
    """``(1 - 1/alpha) (Tr rho^alpha)^(1/(alpha-1)) / (Tr rho)^(1/(alpha-1) - 1)``.

    At ``alpha = 2`` this is ``C_2 / 2``. For normalized pure states the
    coefficient of ``rho^(alpha-1)`` in the gradient is exactly 1, so the
    induced dynamics of pure states is linear for every ``alpha``.
    """
    alpha = _check_alpha(alpha)
    return _renyi("renyi_a", alpha, 1.0 - 1.0 / alpha)


def renyi_b(alpha: float) -> Functional:
    """``(1/2) (Tr rho^alpha)^(1/(alpha-1)) / (Tr rho)^(1/(alpha-1) - 1)``; equals ``(Tr rho)^2 / 2`` on pure states."""
    alpha = _check_alpha(alpha)
    return _renyi("renyi_b", alpha, 0.5)


@dataclass(frozen=True)
class CasimirPhi:
    """A scalar function of ``(C_1, ..., C_kmax)`` with its partial derivatives."""

    name: str
    k_max: int
    phi: Callable[[np.ndarray], float]
    dphi: Callable[[np.ndarray], np.ndarray]


PHI_PRESETS = {
    "c2_half": CasimirPhi("c2_half", 2, lambda c: 0.5 * c[1], lambda c: np.array([0.0, 0.5])),
    "c1": CasimirPhi("c1", 1, lambda c: c[0], lambda c: np.array([1.0])),
    "c2sq_plus_c3": CasimirPhi(
        "c2sq_plus_c3", 3, lambda c: c[1] ** 2 + c[2], lambda c: np.array([0.0, 2 * c[1], 1.0])
    ),
}


def casimir_function(phi: CasimirPhi | str) -> Functional:
    """``S = phi(C_1, ..., C_k)``; gradient ``sum_k dphi/dC_k * k * rho^(k-1)``."""
    if isinstance(phi, str):
        try:
            phi = PHI_PRESETS[phi]
        except KeyError:
            raise ValueError(f"unknown phi preset {phi!r}; known: {sorted(PHI_PRESETS)}") from None
    kmax = phi.k_max

    def casimirs(r):
        return np.array([np.trace(_int_power(r, k)).real for k in range(1, kmax + 1)])

    def gradient(r):
        w = phi.dphi(casimirs(r))
        return sum(w[k - 1] * k * _int_power(r, k - 1) for k in range(1, kmax + 1))

    def profile(r):
        w = phi.dphi(casimirs(r))

        def f(p):
            p = np.asarray(p)
            return sum(w[k - 1] * k * p ** (k - 1) for k in range(1, kmax + 1))

        return f

    return Functional(
        "casimir_function",
        {"phi": phi.name, "k_max": kmax},
        lambda r: float(phi.phi(casimirs(r))),
        gradient,
        profile,
    )


def gradient_check(F: Functional, rho, eps: float = 1e-5, n_dirs: int = 20, seed: int = 0) -> float:
    """Max central-difference error of ``F.gradient`` over seeded Hermitian directions.

    Directions are normalized to unit max-norm. If ``rho +- eps*Delta`` leaves
    the PSD cone the direction is halved (up to 5 times) and then skipped.
    """
    if not 1e-7 <= eps <= 1e-3:
        raise ValueError(f"eps must lie in [1e-7, 1e-3], got {eps}")
    rho = np.asarray(rho, dtype=complex)
    d = rho.shape[0]
    g = F.gradient(rho)
    worst = 0.0
    for j in range(n_dirs):
        delta = random_hermitian(d, seed=seed * 1000 + j)
        delta /= np.abs(delta).max()
        for _ in range(6):
            plus, minus = rho + eps * delta, rho - eps * delta
            if min(np.linalg.eigvalsh(plus)[0], np.linalg.eigvalsh(minus)[0]) >= -1e-14:
                break
            delta = delta / 2
        else:
            continue
        fd = (F.value(plus) - F.value(minus)) / (2 * eps)
        exact = np.trace(g @ delta).real
        worst = max(worst, abs(fd - exact))
    return worst


def functional_from_json(obj: dict) -> Functional:
    """Build a functional from ``{"kind": ..., "alpha"|"n"|"matrix"|"phi": ...}``."""
    from .matrixcore import matrix_from_json

    kind = obj.get("kind")
    if kind == "linear":
        return linear_observable(matrix_from_json(obj["matrix"]))
    if kind == "casimir":
        return casimir(int(obj["n"]))
    if kind == "renyi_a":
        return renyi_a(float(obj["alpha"]))
    if kind == "renyi_b":
        return renyi_b(float(obj["alpha"]))
    if kind == "casimir_function":
        return casimir_function(str(obj["phi"]))
    raise ValueError(f"unknown functional kind {kind!r}")


def functional_to_json(F: Functional) -> dict:
    from .matrixcore import matrix_to_json

    if F.kind == "linear":
        return {"kind": "linear", "matrix": matrix_to_json(F.params["matrix"])}
    if F.kind == "casimir":
        return {"kind": "casimir", "n": F.params["n"]}
    if F.kind in ("renyi_a", "renyi_b"):
        return {"kind": F.kind, "alpha": F.params["alpha"]}
    if F.kind == "casimir_function":
        return {"kind": "casimir_function", "phi": F.params["phi"]}
    raise ValueError(f"functional kind {F.kind!r} has no JSON descriptor")
