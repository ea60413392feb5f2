import numpy as np
import pytest

from nambulab.dynamics import (
    EvolutionSpec,
    IntegrationError,
    UnsupportedGeneratorError,
    diagnostics_table,
    drift_report,
    evolve,
    lax_generator,
    linear_reference,
    observable_rate,
    read_csv,
    renyi_spec,
    step_isospectral,
    step_rk4,
    write_csv,
)
from nambulab.functionals import (
    Functional,
    casimir,
    casimir_function,
    linear_observable,
    quadratic_observable,
    renyi_a,
    renyi_b,
)
from nambulab.matrixcore import random_density, random_hermitian

from conftest import I2, SX, SY, SZ

VN = casimir(2) / 2


def test_linear_reference_examples():
    rho = random_density(3, seed=0)
    A = random_hermitian(3, 1)
    assert np.array_equal(linear_reference(rho, A, 0.0), rho) or np.abs(linear_reference(rho, A, 0.0) - rho).max() <= 1e-15
    D = np.diag([0.5, 0.3, 0.2]).astype(complex)
    assert np.abs(linear_reference(D, np.diag([1.0, -2.0, 0.7]), 3.3) - D).max() <= 1e-15
    out = linear_reference(0.5 * (I2 + SZ), SX, np.pi / 2)
    assert np.abs(out - 0.5 * (I2 - SZ)).max() <= 1e-15


def test_rk4_one_step_order():
    A = random_hermitian(3, 2)
    rho = random_density(3, seed=3)
    H = linear_observable(A)
    errs = [np.abs(step_rk4(rho, dt, H, VN) - linear_reference(rho, A, dt)).max() for dt in (1e-2, 5e-3)]
    # local error O(dt^5): halving dt shrinks it by ~32
    assert errs[0] / errs[1] >= 25
    assert errs[0] <= 10 * 1e-2**5


def test_rk4_global_order():
    A = random_hermitian(3, 4)
    rho = random_density(3, seed=5)
    errs = []
    for dt in (0.1, 0.05):
        traj = evolve(rho, EvolutionSpec(linear_observable(A), VN, 2.0, dt, "rk4"))
        errs.append(np.abs(traj.final - linear_reference(rho, A, 2.0)).max())
    assert errs[0] / errs[1] >= 14


@pytest.mark.parametrize("stepper", [step_rk4, step_isospectral])
def test_stationary_input(stepper):
    D = np.diag([0.6, 0.3, 0.1]).astype(complex)
    H = linear_observable(np.diag([1.0, 0.2, -0.5]))
    for S in (VN, renyi_a(3), renyi_a(1.5)):
        assert np.abs(stepper(D, 0.1, H, S) - D).max() <= 1e-14


def test_rk4_pure_state_renyi3_matches_linear():
    A = random_hermitian(3, 6)
    psi_rho = random_density(3, rank=1, seed=7)
    out = step_rk4(psi_rho, 1e-3, linear_observable(A), renyi_a(3))
    assert np.abs(out - linear_reference(psi_rho, A, 1e-3)).max() <= 1e-10


def test_isospectral_vn_is_exact_conjugation():
    A = random_hermitian(4, 8)
    rho = random_density(4, seed=9)
    H = linear_observable(A)
    assert np.abs(lax_generator(rho, H, VN) - (-1j * A)).max() <= 1e-13
    assert np.abs(step_isospectral(rho, 0.3, H, VN) - linear_reference(rho, A, 0.3)).max() <= 1e-14


def test_isospectral_1000_steps_spectrum():
    rho = random_density(4, seed=10)
    H = linear_observable(random_hermitian(4, 11))
    p0 = np.linalg.eigvalsh(rho)
    for S in (renyi_a(3), renyi_a(1.5), casimir_function("c2sq_plus_c3")):
        r = rho
        for _ in range(1000):
            r = step_isospectral(r, 0.01, H, S)
        assert np.abs(np.linalg.eigvalsh(r) - p0).max() <= 1e-12


def test_cross_method_d2_alpha3():
    rho = random_density(2, seed=12)
    spec_iso = renyi_spec(random_hermitian(2, 13), 3, 1.0, 0.01, "isospectral")
    spec_rk = renyi_spec(random_hermitian(2, 13), 3, 1.0, 1e-4, "rk4")
    a, b = evolve(rho, spec_iso).final, evolve(rho, spec_rk).final
    assert np.abs(a - b).max() <= 1e-6


def test_nonlinear_dynamics_differs_from_linear():
    # sanity: for mixed states with alpha != 2 the flow is genuinely nonlinear
    rho = random_density(3, seed=14)
    A = random_hermitian(3, 15)
    traj = evolve(rho, renyi_spec(A, 3, 2.0, 0.01))
    assert np.abs(traj.final - linear_reference(rho, A, 2.0)).max() >= 1e-3


def test_pure_state_purity_renyi4():
    rho = random_density(2, rank=1, seed=16)
    traj = evolve(rho, EvolutionSpec(linear_observable(SZ), renyi_a(4), 5.0, 0.01))
    assert np.abs(traj.diagnostics["C"][:, 1] - 1).max() <= 1e-9
    assert np.abs(traj.final - linear_reference(rho, SZ, 5.0)).max() <= 1e-8


def test_isospectral_casimir_drift():
    rho = random_density(3, seed=17)
    traj = evolve(rho, renyi_spec(random_hermitian(3, 18), 1.5, 3.0, 0.01))
    rep = drift_report(traj)
    assert rep["casimir_drift"] <= 1e-10
    assert rep["eigenvalue_drift"] <= 1e-12


@pytest.mark.parametrize("lam", [0.5, 2.0, 10.0])
def test_homogeneity_symmetry(lam):
    rho = random_density(3, seed=19)
    A = random_hermitian(3, 20)
    for alpha in (1.5, 3):
        a = evolve(rho, renyi_spec(A, alpha, 2.0, 0.01)).states
        b = evolve(lam * rho, renyi_spec(A, alpha, 2.0, 0.01)).states
        assert np.abs(b - lam * a).max() <= 1e-8


def test_time_reversal():
    rho = random_density(4, seed=21)
    A = random_hermitian(4, 22)
    fwd = evolve(rho, renyi_spec(A, 3, 3.0, 0.01)).final
    back = evolve(fwd, renyi_spec(-A, 3, 3.0, 0.01)).final
    assert np.abs(back - rho).max() <= 1e-8


def test_rk4_eigenvalue_drift_small_dt():
    rho = random_density(3, seed=23)
    traj = evolve(rho, renyi_spec(random_hermitian(3, 24), 3, 1.0, 1e-3, "rk4"))
    rep = drift_report(traj)
    assert rep["eigenvalue_drift"] <= 1e-6
    assert rep["casimir_drift"] <= 1e-6
    assert rep["energy_drift"] <= 1e-6


def test_isospectral_energy_conservation():
    # error term is O(dt^4); at dt = 2.5e-3 it sits well below 1e-10
    rho = random_density(4, seed=25)
    traj = evolve(rho, renyi_spec(random_hermitian(4, 26), 3, 2.0, 2.5e-3))
    assert drift_report(traj)["energy_drift"] <= 1e-10


def test_renyi2_matches_linear():
    rho = random_density(3, seed=27)
    A = random_hermitian(3, 28)
    traj = evolve(rho, renyi_spec(A, 2, 2.0, 0.01))
    assert drift_report(traj)["max_linear_deviation"] <= 1e-8


def test_renyi_b_pure_rescaled_hamiltonian():
    rho = random_density(3, rank=1, seed=29)
    A = random_hermitian(3, 30)
    for alpha in (1.5, 3):
        traj = evolve(rho, EvolutionSpec(linear_observable(A), renyi_b(alpha), 1.0, 0.01))
        ref = linear_reference(rho, A * alpha / (2 * (alpha - 1)), 1.0)
        assert np.abs(traj.final - ref).max() <= 1e-8


def test_observable_rate_trivial_cases():
    rho = random_density(3, seed=31)
    A = random_hermitian(3, 32)
    assert observable_rate(np.eye(3), A, rho, 3) == pytest.approx(0, abs=1e-14)
    assert observable_rate(A, A, rho, 2.5) == pytest.approx(0, abs=1e-14)
    with pytest.raises(ValueError):
        observable_rate(A, A, rho, 1.0)


def test_observable_rate_vs_trajectory():
    rho = random_density(2, seed=33)
    A = random_hermitian(2, 34)
    h = 1e-4
    traj = evolve(rho, renyi_spec(A, 3, 2 * h, h))
    f = np.trace(SX @ traj.states, axis1=1, axis2=2).real
    numeric = (f[2] - f[0]) / (2 * h)
    assert observable_rate(SX, A, traj.states[1], 3) == pytest.approx(numeric, abs=1e-6)


def test_unsupported_generator():
    rho = random_density(2, seed=0)
    S = quadratic_observable(SY)
    with pytest.raises(UnsupportedGeneratorError):
        step_isospectral(rho, 0.01, linear_observable(SX), S)
    # RK4 accepts it
    evolve(rho, EvolutionSpec(linear_observable(SX), S, 0.1, 0.01, "rk4"))


@pytest.mark.parametrize("method", ["rk4", "isospectral"])
def test_nan_aborts_with_step_index(method):
    calls = {"n": 0}

    def grad(r):
        calls["n"] += 1
        return SZ * (np.nan if calls["n"] > 8 else 1.0)

    H = Functional("custom", {}, lambda r: 0.0, grad)
    with pytest.raises(IntegrationError) as err:
        evolve(0.5 * (I2 + SX) + 0.1 * SZ, EvolutionSpec(H, VN, 1.0, 0.1, method))
    assert err.value.step == 3


def test_spec_validation():
    H = linear_observable(SX)
    with pytest.raises(ValueError):
        EvolutionSpec(H, VN, 1.0, 0.0)
    with pytest.raises(ValueError):
        EvolutionSpec(H, VN, -1.0, 0.1)
    with pytest.raises(ValueError):
        EvolutionSpec(H, VN, 1.0, 0.1, "euler")


def test_final_time_within_dt():
    traj = evolve(random_density(2, seed=1), EvolutionSpec(linear_observable(SX), VN, 1.0, 0.3))
    assert abs(traj.times[-1] - 1.0) <= 0.3
    assert np.all(np.diff(traj.times) > 0)


def test_rk4_psd_warning():
    rho = random_density(3, rank=1, seed=2)
    with pytest.warns(UserWarning, match="PSD"):
        evolve(rho, EvolutionSpec(linear_observable(10 * random_hermitian(3, 3)), VN, 1.0, 0.5, "rk4"))


def test_diagnostics_stationary_constant():
    D = np.diag([0.7, 0.2, 0.1]).astype(complex)
    traj = evolve(D, renyi_spec(np.diag([1.0, 2.0, 3.0]), 3, 1.0, 0.1))
    for name, col in diagnostics_table(traj).items():
        if name not in ("t", "linear_deviation"):
            assert np.ptp(col) <= 1e-14, name


def test_diagnostics_nonlinear_mixed():
    rho = random_density(3, seed=35)
    traj = evolve(rho, renyi_spec(random_hermitian(3, 36), 1.5, 1.0, 0.01))
    cols = diagnostics_table(traj)
    for j in (1, 2, 3):
        assert np.ptp(cols[f"p_{j}"]) <= 1e-12
    assert np.ptp(traj.states[:, 0, 1].real) >= 1e-3


def test_csv_schema_and_roundtrip(tmp_path):
    traj = evolve(random_density(2, seed=37), renyi_spec(SX, 3, 0.05, 0.01))
    path = tmp_path / "traj.csv"
    write_csv(traj, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "t,C1,C2,C3,C4,p_1,p_2,S_value,H_value,linear_deviation"
    assert len(lines) == len(traj) + 1
    back = read_csv(path)
    for name, col in diagnostics_table(traj).items():
        assert np.array_equal(back[name], col)
