"""Command-line front end: ``collapse-sim <subcommand>``.

Exit status is 0 on success, 1 for configuration or domain errors and 2 for
numerical failures (aborted runs, failed fits, shooting failures).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .config import PRESETS, ConfigError, RunConfig, load_config, load_preset
from .diagnostics import FitError, fit_series, loglog_data, t0_line_data
from .eigenproblem import BracketError, IntegrationBreakdown, NoConvergence, ShootingConfig, ode_residual, solve_eigenvalue
from .pde_solver import RunAborted, run
from .physmap import DomainError, RockFluidParams, reduce
from .selfsimilar import (
    ExponentialLimitSolution,
    Regime,
    SelfSimilarSolution,
    classify,
    eval_collapse,
    eval_decay,
    eval_exponential,
    h_max,
    half_width,
    mu_of_c,
)
from .series import CSV_FORMAT, read_series, write_run

OUT_ENV = "COLLAPSE_SIM_OUT"
MANIFEST_VERSION = 1


class NumericalFailure(RuntimeError):
    pass


def _write_csv(path, header, columns):
    data = np.column_stack(columns)
    if path is None or path == "-":
        np.savetxt(sys.stdout, data, fmt=CSV_FORMAT, delimiter=",", header=header, comments="")
    else:
        np.savetxt(path, data, fmt=CSV_FORMAT, delimiter=",", header=header, comments="")


def _out_dir(cli_value, config_value, default):
    if cli_value:
        return cli_value
    if os.environ.get(OUT_ENV):
        return os.environ[OUT_ENV]
    return config_value or default


# ---------------------------------------------------------------- simulate


def _simulate_one(cfg: RunConfig, out_dir: str) -> dict:
    try:
        series = run(cfg.initial_condition(), cfg.c, cfg.scheme_config())
    except RunAborted as exc:
        raise NumericalFailure(str(exc)) from exc
    paths = write_run(series, out_dir, cfg.run_id)
    last = series.final
    summary = {"t": last.t, "x_f": last.x_f, "h_max": float(np.max(last.h)), "stop_reason": series.stop_reason}
    manifest = {
        "manifest_version": MANIFEST_VERSION,
        "artifact_version": __version__,
        "config": cfg.resolved(),
        "c": cfg.c,
        "outputs": [os.path.basename(p) for p in paths],
        "summary": summary,
    }
    with open(os.path.join(out_dir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return summary


def _sweep_member(args):
    data, out_dir = args
    return _simulate_one(RunConfig.from_dict(data), out_dir)


def cmd_simulate(ns) -> int:
    cfg = load_preset(ns.preset) if ns.preset else load_config(ns.config)
    out = _out_dir(ns.out, cfg.output_dir, os.path.join("runs", cfg.run_id))
    if not ns.sweep:
        s = _simulate_one(cfg, out)
        print(f"{cfg.run_id}: t={s['t']:.6g} x_f={s['x_f']:.6g} h_max={s['h_max']:.6g} stop={s['stop_reason']}")
        return 0
    if cfg.rock is not None:
        raise ConfigError("--sweep overrides c and cannot be combined with physical parameters")
    jobs = []
    for c in ns.sweep:
        data = cfg.resolved()
        data["c"] = c
        data["run_id"] = f"{cfg.run_id}_c{c:g}"
        data["output_dir"] = None
        RunConfig.from_dict(data)  # fail early on a bad member
        jobs.append((data, os.path.join(out, data["run_id"])))
    if ns.jobs > 1:
        with ProcessPoolExecutor(max_workers=ns.jobs) as pool:
            results = list(pool.map(_sweep_member, jobs))
    else:
        results = [_sweep_member(j) for j in jobs]
    for (data, _), s in zip(jobs, results):
        print(f"{data['run_id']}: t={s['t']:.6g} x_f={s['x_f']:.6g} h_max={s['h_max']:.6g} stop={s['stop_reason']}")
    return 0


# ---------------------------------------------------------------- fit


def cmd_fit(ns) -> int:
    try:
        series = read_series(ns.series)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read series: {exc}") from exc
    window = tuple(ns.window) if ns.window else None
    result = fit_series(series, ns.c, window)
    report = result.as_dict()
    out = _out_dir(ns.out, None, os.path.dirname(os.path.abspath(ns.series)))
    os.makedirs(out, exist_ok=True)
    stem = os.path.splitext(os.path.basename(ns.series))[0]
    with open(os.path.join(out, f"{stem}_fit.json"), "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    _write_csv(os.path.join(out, f"{stem}_t0_line.csv"), "t,xf2_over_hmax", t0_line_data(series))
    _write_csv(os.path.join(out, f"{stem}_loglog.csv"), "ln_t0_minus_t,ln_xf", loglog_data(series, result.t0))
    print(json.dumps(report, sort_keys=True))
    return 0


# ---------------------------------------------------------------- selfsimilar


def cmd_selfsimilar(ns) -> int:
    params = classify(ns.c)
    if params.regime is Regime.EXPONENTIAL_BOUNDARY:
        if ns.theta is None or ns.C is None:
            raise DomainError("c = 3/2 needs --theta and --C")
        sol = ExponentialLimitSolution(C=ns.C, Theta=ns.theta, x0=ns.x0)
        evaluate = lambda x, t: eval_exponential(sol, x, t)  # noqa: E731
        width, top = sol.half_width, sol.h_max
    else:
        if ns.B is None or ns.t0 is None:
            raise DomainError("--B and --t0 are required for c != 3/2")
        sol = SelfSimilarSolution.create(ns.c, ns.B, ns.t0, ns.x0)
        ev = eval_collapse if sol.regime is Regime.FINITE_TIME_COLLAPSE else eval_decay
        evaluate = lambda x, t: ev(sol, x, t)  # noqa: E731
        width = lambda t: half_width(sol, t)  # noqa: E731
        top = lambda t: h_max(sol, t)  # noqa: E731
    if ns.series:
        if ns.t_start is None or ns.t_end is None:
            raise DomainError("--series needs --t-start and --t-end")
        ts = np.linspace(ns.t_start, ns.t_end, ns.n)
        _write_csv(ns.output, "t,x_f,h_max", (ts, np.atleast_1d(width(ts)), np.atleast_1d(top(ts))))
        return 0
    if ns.t is None:
        raise DomainError("--t is required unless --series is given")
    xf = width(ns.t)
    x = np.linspace(ns.x0 - xf, ns.x0 + xf, ns.n)
    _write_csv(ns.output, "x,h", (x, np.atleast_1d(evaluate(x, ns.t))))
    return 0


# ---------------------------------------------------------------- shoot


def cmd_shoot(ns) -> int:
    cfg = ShootingConfig(c=ns.c, start_offset=ns.start_offset, ode_step=ns.ode_step or ns.start_offset / 10)
    sol = solve_eigenvalue(ns.c, cfg)
    exact = mu_of_c(ns.c)
    print(f"mu_numeric = {sol.mu_numeric:.15g}")
    print(f"mu_analytic = {exact:.15g}")
    print(f"abs_error = {abs(sol.mu_numeric - exact):.3e}")
    print(f"residual_at_zero = {sol.residual_at_zero:.3e}")
    print(f"ode_residual = {ode_residual(sol.xi, sol.profile, sol.mu_numeric, ns.c):.3e}")
    print(f"sign_changes = {len(sol.candidates)}")
    if ns.profile:
        _write_csv(ns.profile, "xi,F", (sol.xi, sol.profile))
    return 0


# ---------------------------------------------------------------- reduce


def cmd_reduce(ns) -> int:
    try:
        with open(ns.params) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read {ns.params}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("parameter file must hold a JSON object")
    try:
        params = RockFluidParams.from_dict(data)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    red = reduce(params)
    report = {"c": red.c, "space_scale": red.space_scale, "kappa": red.kappa, "regime": classify(red.c).regime.value}
    print(json.dumps(report, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="collapse-sim", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="run the moving-interface solver")
    src = s.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", help="JSON config or a manifest.json from an earlier run")
    src.add_argument("--preset", choices=PRESETS)
    s.add_argument("--out", help=f"output directory (overrides ${OUT_ENV} and the config)")
    s.add_argument("--sweep", type=float, nargs="+", metavar="C", help="run once per c value")
    s.add_argument("--jobs", type=int, default=1, help="parallel sweep members")
    s.set_defaults(func=cmd_simulate)

    f = sub.add_parser("fit", help="fit t0, B and mu to a series CSV")
    f.add_argument("--series", required=True)
    f.add_argument("--c", type=float, required=True)
    f.add_argument("--window", type=float, nargs=2, metavar=("T_LO", "T_HI"))
    f.add_argument("--out")
    f.set_defaults(func=cmd_fit)

    e = sub.add_parser("selfsimilar", help="sample a closed-form solution")
    e.add_argument("--c", type=float, required=True)
    e.add_argument("--B", type=float)
    e.add_argument("--t0", type=float)
    e.add_argument("--t", type=float)
    e.add_argument("--x0", type=float, default=0.0)
    e.add_argument("--theta", type=float)
    e.add_argument("--C", type=float)
    e.add_argument("--series", action="store_true", help="emit t,x_f,h_max instead of a profile")
    e.add_argument("--t-start", type=float)
    e.add_argument("--t-end", type=float)
    e.add_argument("--n", type=int, default=201)
    e.add_argument("--output", help="CSV path (default: stdout)")
    e.set_defaults(func=cmd_selfsimilar)

    h = sub.add_parser("shoot", help="recover mu by shooting")
    h.add_argument("--c", type=float, required=True)
    h.add_argument("--start-offset", type=float, default=1e-3)
    h.add_argument("--ode-step", type=float)
    h.add_argument("--profile", help="write xi,F to this CSV")
    h.set_defaults(func=cmd_shoot)

    r = sub.add_parser("reduce", help="reduce rock/fluid parameters to c")
    r.add_argument("--params", required=True)
    r.set_defaults(func=cmd_reduce)
    return p


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        return ns.func(ns)
    except (ConfigError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (NumericalFailure, FitError, BracketError, NoConvergence, IntegrationBreakdown) as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
