"""Command-line experiment runner.

    nambulab evolve --dim 4 --alpha 3 --entropy renyi-a --method isospectral \
        --dt 0.01 --t-end 10 --seed 1 --out traj.csv
    nambulab nosignal --dims 2,3 --trials 50 --seed 0
    nambulab algebra --dim 3
    nambulab dirac --mass 1 --k 0.3,-1.2,0.7 --check identities
    nambulab gradcheck --kind renyi_a --alpha 2.5 --dim 3 --seed 0

Every subcommand prints a JSON report on stdout and exits 1 if a checked
tolerance is violated, 2 on usage errors. Randomness comes from
``numpy.random.default_rng(seed)`` (PCG64).
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import brackets, dirac, dynamics, functionals, multipartite
from .matrixcore import (
    MatrixError,
    check_density,
    check_hermitian,
    matrix_from_json,
    matrix_to_json,
    random_density,
    random_hermitian,
)

TOLERANCES = {
    "isospectral_drift": 1e-10,
    "rk4_drift": 1e-6,
    "linear_deviation": 1e-8,
    "nosignal": 1e-10,
    "jacobi": 1e-12,
    "antisymmetry": 1e-12,
    "tensor_vs_matrix": 1e-10,
    "gradient": 1e-6,
    "identities": 1e-13,
    "dispersion": 1e-10,
    "norm": 1e-12,
    "hamilton": 1e-6,
}


class UsageError(Exception):
    pass


def load_matrix(path) -> np.ndarray:
    """Read a Hermitian matrix from matrix JSON."""
    with open(path) as fh:
        M = matrix_from_json(json.load(fh))
    try:
        return check_hermitian(M, name=str(path))
    except MatrixError as exc:
        raise MatrixError(f"{path}: rejected by the Hermitian invariant ({exc})") from exc


def load_density(path) -> np.ndarray:
    rho = load_matrix(path)
    return check_density(rho, name=str(path))


def save_matrix(path, M) -> None:
    Path(path).write_text(json.dumps(matrix_to_json(M)) + "\n")


def _entropy(kind: str, alpha: float) -> functionals.Functional:
    if kind == "renyi-a":
        return functionals.renyi_a(alpha)
    if kind == "renyi-b":
        return functionals.renyi_b(alpha)
    if kind == "c2":
        return functionals.casimir(2) / 2
    raise UsageError(f"unknown entropy {kind!r}")


def _floats(text: str, n: int | None = None) -> list:
    try:
        vals = [float(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None
    if n is not None and len(vals) != n:
        raise UsageError(f"expected {n} comma-separated numbers, got {text!r}")
    return vals


def cmd_evolve(args) -> tuple[dict, bool]:
    if args.hamiltonian:
        H_hat = load_matrix(args.hamiltonian)
    else:
        H_hat = random_hermitian(args.dim, seed=args.seed)
    d = H_hat.shape[0]
    if args.rho:
        rho0 = load_density(args.rho)
    else:
        rho0 = random_density(d, rank=args.rank or d, seed=args.seed + 1)
    if rho0.shape != H_hat.shape:
        raise UsageError(f"state {rho0.shape} and Hamiltonian {H_hat.shape} dimensions differ")
    spec = dynamics.EvolutionSpec(
        functionals.linear_observable(H_hat), _entropy(args.entropy, args.alpha),
        args.t_end, args.dt, args.method,
    )
    traj = dynamics.evolve(rho0, spec)
    if args.out:
        dynamics.write_csv(traj, args.out)
    report = dynamics.drift_report(traj)
    tol = TOLERANCES["isospectral_drift" if args.method == "isospectral" else "rk4_drift"]
    ok = report["casimir_drift"] <= tol and report["eigenvalue_drift"] <= tol
    linear_case = args.entropy == "c2" or (args.entropy == "renyi-a" and args.alpha == 2)
    if linear_case:
        ok = ok and report["max_linear_deviation"] <= TOLERANCES["linear_deviation"]
    report.update(steps=len(traj) - 1, method=args.method, tolerance=tol, linear_case=linear_case)
    return report, ok


def cmd_nosignal(args):
    dims = [int(x) for x in _floats(args.dims, 2)]
    report = multipartite.nosignal_report(dims, args.trials, args.seed)
    ok = max(report["max_bracket"], report["max_generator_gap"]) <= TOLERANCES["nosignal"]
    return report, ok


def tensor_vs_matrix(d: int, seed: int = 0, trials: int = 10) -> float:
    T = brackets.structure_tensor(d)
    rng = np.random.default_rng(seed)
    pool = [
        lambda: functionals.linear_observable(random_hermitian(d, seed=int(rng.integers(2**31)))),
        lambda: functionals.casimir(int(rng.integers(2, 5))),
        lambda: functionals.renyi_a(float(rng.uniform(1.5, 4.0))),
        lambda: functionals.casimir_function("c2sq_plus_c3"),
    ]
    worst = 0.0
    for _ in range(trials):
        F, G, H = (pool[int(rng.integers(len(pool)))]() for _ in range(3))
        rho = random_density(d, seed=int(rng.integers(2**31)))
        gap = brackets.bracket_via_tensor(F, G, H, rho, T) - brackets.lie_nambu(F, G, H, rho)
        worst = max(worst, abs(gap))
    return worst


def algebra_report(d: int, seed: int = 0) -> dict:
    T = brackets.structure_tensor(d)
    return {
        "d": d,
        "jacobi_residual": brackets.jacobi_residual(T),
        "antisymmetry_residual": brackets.antisymmetry_residual(T),
        "tensor_vs_matrix_max": tensor_vs_matrix(d, seed),
    }


def cmd_algebra(args):
    if not 2 <= args.dim <= 4:
        raise UsageError("algebra --dim must be 2, 3 or 4")
    report = algebra_report(args.dim, args.seed)
    ok = (
        report["jacobi_residual"] <= TOLERANCES["jacobi"]
        and report["antisymmetry_residual"] <= TOLERANCES["antisymmetry"]
        and report["tensor_vs_matrix_max"] <= TOLERANCES["tensor_vs_matrix"]
    )
    return report, ok


def _random_modes(rng, n_modes: int, k=None):
    modes = []
    for _ in range(n_modes):
        kk = np.asarray(k) if k is not None else rng.normal(size=3)
        psi = rng.normal(size=2) + 1j * rng.normal(size=2)
        xi = rng.normal(size=2) + 1j * rng.normal(size=2)
        modes.append((dirac.SpinorMode(kk, psi, xi), complex(rng.normal(), rng.normal())))
    return modes


def cmd_dirac(args):
    m = args.mass
    if m < 0:
        raise UsageError("--mass must be non-negative")
    k = np.array(_floats(args.k, 3))
    if args.check in ("evolve", "hamilton") and args.seed is None:
        raise UsageError(f"--check {args.check} draws random modes and needs --seed")
    rng = np.random.default_rng(args.seed)
    report = {"check": args.check, "mass": m, "k": k.tolist()}
    if args.check == "identities":
        res = dirac.spinor_identity_residuals()
        forms = [dirac.form_equivalence_test(mode, E, m) for E, mode in dirac.eigenmodes(k, m)]
        report.update(res, form_equivalence=max(forms))
        ok = max(res.values()) <= TOLERANCES["identities"] and max(forms) <= 1e-12
    elif args.check == "dispersion":
        grid = np.vstack([dirac.k_grid_27(), k[None, :]])
        res = dirac.dispersion_residual(grid, [m])
        eig = max(dirac.dirac_residual(mode, E, m) for E, mode in dirac.eigenmodes(k, m))
        report.update(dispersion_residual=res, eigenmode_residual=eig)
        ok = res <= TOLERANCES["dispersion"] and eig <= 1e-12
    elif args.check == "evolve":
        modes = _random_modes(rng, 5)
        before = dirac.mode_norm(modes)
        after = dirac.mode_norm(dirac.evolve_modes(modes, m, args.t))
        drift = abs(after - before) / max(1.0, before)
        report.update(t=args.t, norm_initial=before, norm_final=after, norm_drift=drift)
        ok = drift <= TOLERANCES["norm"]
    else:
        res = dirac.hamilton_equations_check(_random_modes(rng, 5), m)
        report.update(hamilton_residual=res)
        ok = res <= TOLERANCES["hamilton"]
    return report, ok


def _gradcheck_functional(args, d):
    kind = args.kind
    if kind == "linear":
        return functionals.linear_observable(random_hermitian(d, seed=args.seed))
    if kind == "casimir":
        return functionals.casimir(args.n)
    if kind == "renyi_a":
        return functionals.renyi_a(args.alpha)
    if kind == "renyi_b":
        return functionals.renyi_b(args.alpha)
    if kind == "casimir_function":
        return functionals.casimir_function(args.phi)
    raise UsageError(f"unknown functional kind {kind!r}")


def cmd_gradcheck(args):
    F = _gradcheck_functional(args, args.dim)
    errs = [
        functionals.gradient_check(F, random_density(args.dim, seed=args.seed + j), args.eps, seed=j)
        for j in range(args.states)
    ]
    report = {"kind": args.kind, "dim": args.dim, "eps": args.eps, "states": args.states,
              "max_error": max(errs)}
    return report, max(errs) <= TOLERANCES["gradient"]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nambulab", description=__doc__.split("\n")[0])
    p.add_argument("--config", help="JSON file {\"subcommand\": ..., <flag>: <value>, ...}")
    sub = p.add_subparsers(dest="subcommand")

    e = sub.add_parser("evolve", help="integrate the generalized von Neumann equation")
    e.add_argument("--dim", type=int, default=4)
    e.add_argument("--alpha", type=float, default=3.0)
    e.add_argument("--entropy", choices=["renyi-a", "renyi-b", "c2"], default="renyi-a")
    e.add_argument("--method", choices=["isospectral", "rk4"], default="isospectral")
    e.add_argument("--dt", type=float, default=0.01)
    e.add_argument("--t-end", type=float, default=10.0)
    e.add_argument("--seed", type=int, required=True)
    e.add_argument("--rank", type=int, default=None)
    e.add_argument("--hamiltonian", help="matrix JSON for the Hamiltonian operator")
    e.add_argument("--rho", help="matrix JSON for the initial state")
    e.add_argument("--out", help="CSV trajectory output path")
    e.set_defaults(func=cmd_evolve)

    n = sub.add_parser("nosignal", help="no-signaling bracket tests")
    n.add_argument("--dims", default="2,2")
    n.add_argument("--trials", type=int, default=100)
    n.add_argument("--seed", type=int, required=True)
    n.set_defaults(func=cmd_nosignal)

    a = sub.add_parser("algebra", help="structure-constant checks")
    a.add_argument("--dim", type=int, default=3)
    a.add_argument("--seed", type=int, default=0)
    a.set_defaults(func=cmd_algebra)

    dr = sub.add_parser("dirac", help="two-spinor Dirac checks")
    dr.add_argument("--mass", type=float, default=1.0)
    dr.add_argument("--k", default="0,0,1")
    dr.add_argument("--check", choices=["identities", "dispersion", "evolve", "hamilton"], default="identities")
    dr.add_argument("--t", type=float, default=100.0)
    dr.add_argument("--seed", type=int, default=None, help="required for the randomized checks")
    dr.set_defaults(func=cmd_dirac)

    g = sub.add_parser("gradcheck", help="finite-difference gradient validation")
    g.add_argument("--kind", choices=["linear", "casimir", "renyi_a", "renyi_b", "casimir_function"],
                   required=True)
    g.add_argument("--dim", type=int, default=3)
    g.add_argument("--alpha", type=float, default=3.0)
    g.add_argument("--n", type=int, default=3)
    g.add_argument("--phi", choices=sorted(functionals.PHI_PRESETS), default="c2sq_plus_c3")
    g.add_argument("--eps", type=float, default=1e-5)
    g.add_argument("--states", type=int, default=20)
    g.add_argument("--seed", type=int, required=True)
    g.set_defaults(func=cmd_gradcheck)
    return p


def _config_argv(path) -> list:
    cfg = json.loads(Path(path).read_text())
    if not isinstance(cfg, dict) or "subcommand" not in cfg:
        raise UsageError("config must be a JSON object with a 'subcommand' key")
    argv = [str(cfg.pop("subcommand"))]
    for key, val in cfg.items():
        argv += [f"--{key.replace('_', '-')}", str(val)]
    return argv


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.config:
            args = parser.parse_args(_config_argv(args.config))
        if args.subcommand is None:
            raise UsageError("a subcommand is required")
        report, ok = args.func(args)
    except (UsageError, MatrixError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"nambulab: error: {exc}", file=sys.stderr)
        return 2
    except ArithmeticError as exc:
        print(f"nambulab: numerical failure: {exc}", file=sys.stderr)
        return 1
    report["ok"] = bool(ok)
    print(json.dumps(report, sort_keys=True))
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
