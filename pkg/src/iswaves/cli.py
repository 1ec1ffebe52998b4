"""Command-line interface: validate, solve, continue, decay, kernel-check,
evolve, sweep.

Every subcommand reads a flat key-value config (--config), optionally
overridden by repeatable --set key=value flags, and writes its artifacts
under --out.  Exit codes: 0 success, 1 numerical failure or inadmissible
input, 2 usage/configuration error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import config as cfgmod
from .config import ConfigError
from .kernels import (
    default_fit_window,
    fit_algebraic_tail,
    fit_exponential_tail,
    kernel_fft_oracle,
    kernel_K1,
    kernel_K2_plateau,
    kernel_K2_quadrature,
    kernel_K3_series,
    kernel_K_plateau,
    kernel_K_quadrature,
)
from .params import (
    InadmissibleParameterError,
    admissibility_report,
    compute_decay_rates,
    compute_speed_window,
    compute_mu2_threshold,
    compute_f_min,
    ModelParams,
)
from .spectral import make_grid, make_multiplier, pair_to_csv, zcothz
from .solvers import (
    ConvergenceError,
    SolitaryBranch,
    assemble_bo_pair,
    canonical_family,
    continue_in_c,
    continue_in_mu2,
    load_branch,
    newton_solve,
    petviashvili_ground_state,
    residual_norm,
    save_branch,
    solve_bfd_reduced,
)
from .evolution import BlowUpError, run, suggest_dt


def _require(cfg: dict, key: str):
    if key not in cfg:
        raise ConfigError(f"missing required key {key!r}")
    return cfg[key]


def _outdir(args) -> str:
    out = args.out or "out"
    os.makedirs(out, exist_ok=True)
    return out


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_validate(cfg: dict, out: str) -> int:
    p = cfgmod.params_from_config(cfg)
    omega = cfg.get("validate.omega", 0.0)
    report = admissibility_report(p, omega)
    cfgmod.write_json(os.path.join(out, "admissibility.json"), report.to_dict(), cfg)
    cfgmod.write_meta(out)
    status = "admissible" if report.admissible else "inadmissible"
    print(f"validate: {status} (speed bound {report.speed_bound:.6g}, "
          f"f_min {report.f_min:.6g}, mu2 threshold {report.mu2_threshold:.6g})")
    for v in report.violations:
        print(f"  violation: {v}")
    return 0 if report.admissible else 1


def cmd_solve(cfg: dict, out: str) -> int:
    p = cfgmod.params_from_config(cfg)
    grid = cfgmod.grid_from_config(cfg)
    scfg = cfgmod.solver_from_config(cfg)
    family = canonical_family(_require(cfg, "solve.family"))

    if family == "BO":
        speed = cfg.get("solve.speed", 0.0)
        nu0 = petviashvili_ground_state(p, grid, scfg)
        pair = newton_solve("BO", p, 0.0, assemble_bo_pair(p, nu0), scfg)
        if speed != 0.0:
            branch = continue_in_c("BO", p, speed, scfg, start=pair, store_at=[speed])
            pair = branch.waves[-1]
        res = residual_norm("BO", p, speed, pair)
        branch = SolitaryBranch("BO", [speed], [pair], [res])
    elif family == "ILW":
        if not p.finite_depth:
            raise ConfigError("ILW solve needs finite params.mu2")
        speed = cfg.get("solve.speed", 0.0)
        chain = continue_in_mu2(p, p.mu2, scfg, grid=grid, milestones=[p.mu2])
        pair = chain.waves[-1]
        if speed != 0.0:
            branch = continue_in_c("ILW", p, speed, scfg, start=pair, store_at=[speed])
            pair = branch.waves[-1]
        res = residual_norm("ILW", p, speed, pair)
        branch = SolitaryBranch("ILW", [speed], [pair], [res])
    else:
        omega = _require(cfg, "solve.omega")
        mode = cfg.get("solve.mu2_mode", "finite" if family == "BFD_finite" else "infinite")
        pair, info = solve_bfd_reduced(p, omega, mode, scfg, grid=grid, return_info=True)
        branch = SolitaryBranch(family, [omega], [pair], [info["full_residual"]])

    save_branch(branch, os.path.join(out, "branch"), cfgmod.resolved_config(cfg))
    report = {
        "family": branch.family,
        "parameter_values": branch.parameter_values,
        "residuals": branch.residuals,
        "amplitude_nu": [float(np.max(np.abs(w.nu))) for w in branch.waves],
        "amplitude_xi": [float(np.max(np.abs(w.xi))) for w in branch.waves],
    }
    cfgmod.write_json(os.path.join(out, "report.json"), report, cfg)
    cfgmod.write_meta(out)
    print(f"solve: {branch.family} residual {branch.residuals[-1]:.3e}")
    return 0


def cmd_continue(cfg: dict, out: str) -> int:
    p = cfgmod.params_from_config(cfg)
    grid = cfgmod.grid_from_config(cfg)
    scfg = cfgmod.solver_from_config(cfg)
    parameter = cfg.get("continue.parameter", "c")
    milestones = None
    if "continue.milestones" in cfg:
        milestones = [float(t) for t in cfg["continue.milestones"].split(",") if t.strip()]

    if parameter == "c":
        family = cfg.get("continue.family", "BO")
        target = _require(cfg, "continue.target")
        branch = continue_in_c(family, p, target, scfg, grid=grid, store_at=milestones)
    elif parameter == "mu2":
        target = _require(cfg, "continue.target")
        branch = continue_in_mu2(p, target, scfg, grid=grid, milestones=milestones)
    else:
        raise ConfigError("continue.parameter must be 'c' or 'mu2'")

    save_branch(branch, os.path.join(out, "branch"), cfgmod.resolved_config(cfg))
    report = {
        "family": branch.family,
        "parameter": parameter,
        "parameter_values": ["inf" if math.isinf(v) else v for v in branch.parameter_values],
        "residuals": branch.residuals,
        "diagnostics": branch.diagnostics,
    }
    cfgmod.write_json(os.path.join(out, "report.json"), report, cfg)
    cfgmod.write_meta(out)
    print(f"continue: {len(branch.waves)} samples, max residual "
          f"{max(branch.residuals):.3e}, truncated={branch.diagnostics.get('truncated')}")
    return 0


def cmd_decay(cfg: dict, out: str) -> int:
    branch = load_branch(_require(cfg, "decay.branch_dir"))
    sample = cfg.get("decay.sample", len(branch.waves) - 1)
    wave = branch.waves[sample]
    field_name = cfg.get("decay.field", "nu")
    if field_name not in ("xi", "nu"):
        raise ConfigError("decay.field must be 'xi' or 'nu'")
    values = wave.nu if field_name == "nu" else wave.xi
    kind = cfg.get("decay.kind", "algebraic")
    window = None
    if "decay.window_lo" in cfg or "decay.window_hi" in cfg:
        window = (
            cfg.get("decay.window_lo", 0.3 * wave.grid.L),
            cfg.get("decay.window_hi", 0.9 * wave.grid.L),
        )
    else:
        window = default_fit_window(wave.grid)
    predicted = cfg.get("decay.predicted")
    if predicted is None and "params.gamma" in cfg:
        p = cfgmod.params_from_config(cfg)
        if kind == "exponential":
            rates = compute_decay_rates(p)
            predicted = rates.ilw_rate if branch.family == "ILW" else rates.sigma

    if kind == "algebraic":
        report = fit_algebraic_tail(wave.grid.x, values, window=window, predicted=predicted)
    elif kind == "exponential":
        report = fit_exponential_tail(wave.grid.x, values, window=window, predicted=predicted)
    else:
        raise ConfigError("decay.kind must be 'algebraic' or 'exponential'")

    cfgmod.write_json(os.path.join(out, f"decay_{field_name}.json"), report.to_dict(), cfg)
    cfgmod.write_meta(out)
    print(f"decay: {kind} fit of {field_name}: measured {report.measured:.6g}, "
          f"r^2 {report.r_squared:.6f}, flags {report.flags}")
    return 0


_KERNEL_GRIDS = {
    # verified grids: closed form vs discrete-transform oracle at <= 2.5e-7
    "K1": (16.0, 2**16),
    "K2": (1024.0, 2**22),
    "K": (1024.0, 2**20),
    "K3": (32.0, 2**21),
}


def cmd_kernel_check(cfg: dict, out: str) -> int:
    which = cfg.get("kernel.which", "all")
    names = ["K", "K1", "K2", "K3"] if which == "all" else [
        w.strip() for w in which.split(",") if w.strip()
    ]
    for name in names:
        if name not in _KERNEL_GRIDS:
            raise ConfigError(f"kernel.which entries must be among K, K1, K2, K3; got {name!r}")
    p = cfgmod.params_from_config(cfg) if "params.gamma" in cfg else None
    sigma = cfg.get("kernel.sigma", 3.0)
    results = {}
    worst = 0.0
    for name in names:
        length, n = _KERNEL_GRIDS[name]
        grid = make_grid(length, n)

        if name == "K1":
            sym = make_multiplier(
                "k1_symbol",
                lambda k: math.sqrt(2.0 * math.pi) * sigma / (sigma**2 + k**2),
                grid,
            )
            xs = [0.5, 1.0, 2.0, 4.0]
            closed = [kernel_K1(sigma, x) for x in xs]
        elif name == "K2":
            if p is None:
                raise ConfigError("kernel K2 needs params.* keys")
            alpha = p.gamma / ((p.beta - 1.0) * math.sqrt(p.mu))
            sym = make_multiplier("k2_symbol", lambda k: 1.0 / (abs(k) + alpha), grid)
            xs = [1.0, 5.0, 10.0]
            closed = [kernel_K2_quadrature(p, x) for x in xs]
        elif name == "K":
            if p is None:
                raise ConfigError("kernel K needs params.* keys")
            rates = compute_decay_rates(p)
            ell, c_k = rates.ell, rates.c_K
            sym = make_multiplier(
                "k_symbol", lambda k: 1.0 / (k**2 - ell * abs(k) + c_k), grid
            )
            xs = [1.0, 2.0, 5.0]
            closed = [kernel_K_quadrature(p, x) for x in xs]
        else:
            if p is None or not p.finite_depth:
                raise ConfigError("kernel K3 needs params.* keys with finite mu2")
            rates = compute_decay_rates(p)
            theta = rates.theta
            smu2 = math.sqrt(p.mu2)
            sym = make_multiplier(
                "k3_symbol",
                lambda k: theta / (zcothz(smu2 * abs(k)) + theta),
                grid,
            )
            xs = [1.0, 2.0, 5.0]
            closed = [kernel_K3_series(p, x)[0] for x in xs]

        oracle = kernel_fft_oracle(sym, grid)
        idx = [int(round((x + grid.L) / grid.dx)) for x in xs]
        ovals = [float(oracle.values[i]) for i in idx]
        diffs = [abs(c - o) for c, o in zip(closed, ovals)]
        results[name] = {
            "x": xs,
            "closed_form": closed,
            "oracle": ovals,
            "max_abs_diff": max(diffs),
        }
        worst = max(worst, max(diffs))

    if p is not None and "K" in names:
        results["K_plateau"] = kernel_K_plateau(p)
    if p is not None and "K2" in names:
        results["K2_plateau"] = kernel_K2_plateau(p)
    results["max_abs_diff"] = worst
    results["tolerance"] = 1e-5
    cfgmod.write_json(os.path.join(out, "kernel_check.json"), results, cfg)
    cfgmod.write_meta(out)
    print(f"kernel-check: max |closed - oracle| = {worst:.3e} (tolerance 1e-5)")
    return 0 if worst < 1e-5 else 1


def cmd_evolve(cfg: dict, out: str) -> int:
    p = cfgmod.params_from_config(cfg)
    family = _require(cfg, "evolve.family")
    T = _require(cfg, "evolve.T")
    integrator = cfg.get("evolve.integrator", "etdrk4")

    initial_kind = cfg.get("evolve.initial", "gaussian")
    if initial_kind == "branch":
        branch = load_branch(_require(cfg, "evolve.branch_dir"))
        sample = cfg.get("evolve.sample", len(branch.waves) - 1)
        initial = branch.waves[sample]
        grid = initial.grid
    elif initial_kind == "gaussian":
        grid = cfgmod.grid_from_config(cfg)
        amp = cfg.get("evolve.amplitude", 0.02)
        width = cfg.get("evolve.width", 1.0)
        bump = amp * np.exp(-((grid.x / width) ** 2))
        from .spectral import WavePair

        initial = WavePair(grid=grid, xi=bump, nu=bump.copy())
    else:
        raise ConfigError("evolve.initial must be 'gaussian' or 'branch'")

    dt = cfg.get("evolve.dt")
    if dt is None:
        dt = suggest_dt(family, p, grid)
    snapshots = cfg.get("evolve.snapshots_every")

    try:
        summary = run(
            family, p, initial, T, dt,
            integrator=integrator,
            snapshots_every=snapshots,
            outdir=out if snapshots is not None else None,
        )
    except (BlowUpError, AssertionError) as exc:
        cfgmod.write_json(os.path.join(out, "trajectory.json"),
                          {"status": "aborted", "error": str(exc)}, cfg)
        cfgmod.write_meta(out)
        print(f"evolve: aborted: {exc}", file=sys.stderr)
        return 1

    final = summary.pop("final_state", None)
    if final is not None:
        pair_to_csv(final, os.path.join(out, "final_state.csv"))
    cfgmod.write_json(os.path.join(out, "trajectory.json"), summary, cfg)
    cfgmod.write_meta(out)
    drift = summary.get("h_drift_max")
    drift_text = f", H drift {drift:.3e}" if drift is not None else ""
    print(f"evolve: {summary['status']} at t = {summary['t_final']:.6g}"
          f"{drift_text}, sup|zeta| {summary['sup_zeta_max']:.6g}")
    return 0 if summary["status"] == "completed" else 1


def cmd_sweep(cfg: dict, out: str) -> int:
    """Randomized admissibility sweep: positive quadratic forms, E >= 0."""
    from .functionals import energy_E, quadratic_form_check

    draws = cfg.get("sweep.draws", 200)
    fields_per_draw = cfg.get("sweep.fields_per_draw", 5)
    seed = cfg.get("seed", 0)
    rng = np.random.default_rng(seed)
    grid = make_grid(20.0, 256)

    violations = []
    min_eigen_global = math.inf
    min_energy = math.inf
    for i in range(draws):
        gamma = rng.uniform(0.1, 0.9)
        b = rng.uniform(1.0 / 6.0, 0.6)
        t = rng.uniform(0.05, 0.95)
        rest = 1.0 / 3.0 - 2.0 * b
        a = t * rest
        c = (1.0 - t) * rest
        mu = rng.uniform(0.05, 0.5)
        p_inf = ModelParams(gamma=gamma, epsilon=0.1, mu=mu, a=a, b=b, c=c, d=b)
        bound = compute_speed_window(p_inf)
        omega = rng.uniform(0.0, 0.95) * bound
        f_min, _, _ = compute_f_min(p_inf, omega)
        if f_min <= 0.0:
            continue
        threshold = compute_mu2_threshold(p_inf, omega)
        mu2 = threshold * rng.uniform(1.05, 10.0)
        p = ModelParams(gamma=gamma, epsilon=0.1, mu=mu, a=a, b=b, c=c, d=b, mu2=mu2)

        form = quadratic_form_check(p, omega, grid)
        min_eigen_global = min(min_eigen_global, form.global_min)
        if form.global_min <= 0.0:
            violations.append({"draw": i, "kind": "quadratic_form",
                               "global_min": form.global_min})
        cut = grid.dealias_cut
        nk = grid.k_half.shape[0]
        for _ in range(fields_per_draw):
            spec = np.zeros(nk, dtype=complex)
            spec[: cut + 1] = rng.standard_normal(cut + 1) + 1j * rng.standard_normal(cut + 1)
            spec[0] = spec[0].real
            xi = np.fft.irfft(spec, n=grid.N)
            spec2 = np.zeros(nk, dtype=complex)
            spec2[: cut + 1] = rng.standard_normal(cut + 1) + 1j * rng.standard_normal(cut + 1)
            spec2[0] = spec2[0].real
            nu = np.fft.irfft(spec2, n=grid.N)
            scale = grid.dx * (np.dot(xi, xi) + np.dot(nu, nu))
            from .spectral import WavePair

            e_val = energy_E(p, omega, WavePair(grid=grid, xi=xi, nu=nu))
            e_norm = e_val / scale
            min_energy = min(min_energy, e_norm)
            if e_norm < -1e-12:
                violations.append({"draw": i, "kind": "energy", "value": e_norm})

    report = {
        "draws": draws,
        "fields_per_draw": fields_per_draw,
        "seed": seed,
        "violations": violations,
        "min_quadratic_form": min_eigen_global,
        "min_normalized_energy": min_energy,
    }
    cfgmod.write_json(os.path.join(out, "sweep.json"), report, cfg)
    cfgmod.write_meta(out)
    print(f"sweep: {draws} draws, {len(violations)} violations, "
          f"min form {min_eigen_global:.3e}, min E {min_energy:.3e}")
    return 0 if not violations else 1


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------


_COMMANDS = {
    "validate": cmd_validate,
    "solve": cmd_solve,
    "continue": cmd_continue,
    "decay": cmd_decay,
    "kernel-check": cmd_kernel_check,
    "evolve": cmd_evolve,
    "sweep": cmd_sweep,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="iswaves",
        description="Solitary-wave workbench for two-layer internal wave models",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="flat key-value config file")
        sp.add_argument("--out", help="output directory (default: ./out)")
        sp.add_argument(
            "--set", action="append", default=[], metavar="KEY=VALUE",
            help="override a config key (repeatable)",
        )
        if name == "evolve":
            sp.add_argument("--family", help="shorthand for --set evolve.family=...")
            sp.add_argument("--T", type=float, help="shorthand for --set evolve.T=...")
            sp.add_argument("--dt", type=float, help="shorthand for --set evolve.dt=...")
            sp.add_argument(
                "--snapshots-every", type=float,
                help="shorthand for --set evolve.snapshots_every=...",
            )
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = cfgmod.load_config(args.config) if args.config else {}
        cfg = cfgmod.apply_overrides(cfg, args.set)
        if args.command == "evolve":
            if args.family is not None:
                cfg["evolve.family"] = args.family
            if args.T is not None:
                cfg["evolve.T"] = args.T
            if args.dt is not None:
                cfg["evolve.dt"] = args.dt
            if args.snapshots_every is not None:
                cfg["evolve.snapshots_every"] = args.snapshots_every
        out = _outdir(args)
        return _COMMANDS[args.command](cfg, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ConvergenceError, BlowUpError, InadmissibleParameterError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
