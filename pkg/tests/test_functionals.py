import numpy as np
import pytest

from nambulab.functionals import (
    CasimirPhi,
    DegenerateStateError,
    casimir,
    casimir_function,
    functional_from_json,
    functional_to_json,
    gradient_check,
    linear_observable,
    product,
    quadratic_observable,
    renyi_a,
    renyi_b,
)
from nambulab.matrixcore import commutator, pure_density, random_density, random_hermitian

from conftest import SZ


def test_linear_observable():
    rho = random_density(3, seed=1, normalize=False)
    assert linear_observable(np.eye(3)).value(rho) == pytest.approx(np.trace(rho).real)
    assert linear_observable(SZ).value(np.diag([0.7, 0.3])) == pytest.approx(0.4)
    A = random_hermitian(4, 2)
    assert np.array_equal(linear_observable(A).gradient(rho[:1, :1]), A)
    assert gradient_check(linear_observable(A), random_density(4, seed=3)) <= 1e-8


def test_linear_gradient_check_is_exact():
    A = random_hermitian(3, 5)
    assert gradient_check(linear_observable(A), random_density(3, seed=0), eps=1e-4) <= 1e-10


def test_casimir_examples():
    rho = random_density(3, seed=4)
    assert np.array_equal(casimir(1).gradient(rho), np.eye(3))
    half = np.diag([0.5, 0.5])
    assert casimir(2).value(half) == pytest.approx(0.5)
    assert np.allclose(casimir(2).gradient(half), np.eye(2))
    assert gradient_check(casimir(4), rho) <= 1e-6
    with pytest.raises(ValueError):
        casimir(0)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_casimir_gradient_commutes(n):
    rho = random_density(4, seed=n)
    assert np.abs(commutator(casimir(n).gradient(rho), rho)).max() <= 1e-10


def test_renyi_a_reduces_to_half_purity_at_alpha_2():
    for seed in range(10):
        rho = random_density(4, seed=seed, normalize=seed % 2 == 0)
        assert renyi_a(2).value(rho) == pytest.approx(casimir(2).value(rho) / 2, rel=1e-12)


@pytest.mark.parametrize("alpha", [1.5, 2, 3, 4])
def test_renyi_a_pure_state_coefficient_is_one(alpha):
    # gradient on a normalized pure state = rho^(alpha-1) + c*1 with unit coefficient
    rho = random_density(3, rank=1, seed=2)
    g = renyi_a(alpha).gradient(rho)
    c_ident = g[0, 0] - rho[0, 0]
    assert np.allclose(g, rho + c_ident * np.eye(3), atol=1e-10)


@pytest.mark.parametrize("alpha", [1.5, 2, 3, 4])
def test_renyi_a_pure_state_value(alpha):
    rho = random_density(3, rank=1, seed=8)
    assert renyi_a(alpha).value(rho) == pytest.approx(1 - 1 / alpha, rel=1e-12)


@pytest.mark.parametrize("alpha", [1.5, 2.5, 3, 4])
@pytest.mark.parametrize("lam", [0.5, 2, 10])
def test_renyi_a_homogeneity(alpha, lam):
    rho = random_density(4, seed=3)
    S = renyi_a(alpha)
    assert S.value(lam * rho) == pytest.approx(lam**2 * S.value(rho), rel=1e-10)


def test_renyi_a_gradient_check():
    assert gradient_check(renyi_a(3), random_density(4, seed=5)) <= 1e-6
    assert gradient_check(renyi_a(2.5), random_density(4, seed=6), eps=1e-5) <= 1e-6


def test_renyi_domain():
    for bad in (1.0, 0.5, -2):
        with pytest.raises(ValueError):
            renyi_a(bad)
        with pytest.raises(ValueError):
            renyi_b(bad)
    with pytest.raises(DegenerateStateError):
        renyi_a(2.5).value(np.zeros((2, 2)))


@pytest.mark.parametrize("alpha", [1.5, 3])
@pytest.mark.parametrize("scale", [1.0, 0.3, 4.0])
def test_renyi_b_pure_state(alpha, scale):
    rho = scale * pure_density(np.array([0.6, 0.8j]))
    assert renyi_b(alpha).value(rho) == pytest.approx(0.5 * scale**2, rel=1e-12)


def test_renyi_b_alpha_2_matches_renyi_a():
    for seed in range(20):
        rho = random_density(3, seed=100 + seed)
        assert renyi_b(2).value(rho) == pytest.approx(renyi_a(2).value(rho), rel=1e-12)


def test_renyi_b_gradient_check():
    assert gradient_check(renyi_b(3), random_density(3, seed=7)) <= 1e-6


def test_casimir_function_examples():
    rho = random_density(3, seed=12)
    assert np.allclose(casimir_function("c2_half").gradient(rho), rho, atol=1e-14)
    assert np.allclose(casimir_function("c1").gradient(rho), np.eye(3))
    assert gradient_check(casimir_function("c2sq_plus_c3"), rho) <= 1e-6


def test_casimir_function_custom_phi():
    phi = CasimirPhi("exp_c2", 2, lambda c: np.exp(c[1]), lambda c: np.array([0.0, np.exp(c[1])]))
    S = casimir_function(phi)
    rho = random_density(3, seed=1)
    assert gradient_check(S, rho) <= 1e-6
    assert np.abs(commutator(S.gradient(rho), rho)).max() <= 1e-10


def test_casimir_function_unknown_preset():
    with pytest.raises(ValueError):
        casimir_function("nope")


def test_central_difference_convergence_order():
    # quadratic functionals are differentiated exactly by central differences
    rho = random_density(3, seed=2)
    for eps in (1e-3, 1e-4):
        assert gradient_check(casimir(2), rho, eps=eps) <= 1e-10
    # quartic: error is O(eps^2)
    e1 = gradient_check(casimir(4), rho, eps=1e-3)
    e2 = gradient_check(casimir(4), rho, eps=1e-4)
    assert np.log10(e1 / e2) >= 1.9


def test_gradient_check_eps_range():
    with pytest.raises(ValueError):
        gradient_check(casimir(2), np.eye(2) / 2, eps=1e-2)


def test_gradient_check_skips_directions_leaving_the_cone():
    # a pure state has no room in most directions; the check must not evaluate outside PSD
    rho = pure_density(np.array([1.0, 0.0]))
    assert gradient_check(linear_observable(SZ), rho, eps=1e-5) <= 1e-10


def test_profile_matches_gradient():
    rho = random_density(4, seed=9)
    p, V = np.linalg.eigh(rho)
    for S in (casimir(3), renyi_a(2.5), renyi_b(3), casimir_function("c2sq_plus_c3"), casimir(2) / 2):
        g = S.gradient(rho)
        spectral = (V * S.profile(rho)(p)) @ V.conj().T
        diff = g - spectral
        assert np.allclose(diff, diff[0, 0] * np.eye(4), atol=1e-10)


def test_arithmetic_and_product():
    rho = random_density(3, seed=3)
    F, G = linear_observable(random_hermitian(3, 1)), casimir(3)
    assert (F + 2 * G).value(rho) == pytest.approx(F.value(rho) + 2 * G.value(rho))
    assert (F - G / 4).value(rho) == pytest.approx(F.value(rho) - G.value(rho) / 4)
    assert gradient_check(product(F, G), rho) <= 1e-6
    assert gradient_check(quadratic_observable(random_hermitian(3, 2)), rho) <= 1e-8


def test_json_descriptor_roundtrip():
    rho = random_density(3, seed=0)
    for F in (linear_observable(random_hermitian(3, 4)), casimir(3), renyi_a(2.5), renyi_b(3),
              casimir_function("c2sq_plus_c3")):
        G = functional_from_json(functional_to_json(F))
        assert G.kind == F.kind
        assert G.value(rho) == F.value(rho)
    with pytest.raises(ValueError):
        functional_from_json({"kind": "mystery"})


def test_fractional_alpha_check_error_is_truncation():
    # near-singular full-rank state: the central-difference error of renyi_a(1.5)
    # is O(eps^2), not a gradient defect
    rho = random_density(4, seed=306)
    assert np.linalg.eigvalsh(rho)[0] < 1e-3
    e1 = gradient_check(renyi_a(1.5), rho, eps=1e-5, seed=6)
    e2 = gradient_check(renyi_a(1.5), rho, eps=5e-6, seed=6)
    assert 3.8 <= e1 / e2 <= 4.2
