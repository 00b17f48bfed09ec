"""Command-line front end: sweeps, trajectories and revival scans as CSV or JSON."""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .errors import InvalidParameters, NoRevivalFound, SqueezeChainError
from .model import ModelParams
from .observables import (average_sweep, evolve, fit_through_origin, ground_state_sweep,
                          resolve_workers, revival_time, uniform_grid)
from .quench import make_quench

EXIT_MISMATCH = 1
EXIT_INVALID = 2
EXIT_COMPUTE = 3
ORACLE_TOL = 1e-9

DEFAULTS = {
    "delta": 0.8,
    "n_sites": 100,
    "h1": 0.8,
    "h2": 1.0,
    "h_min": 0.0,
    "h_max": 2.0,
    "steps": 201,
    "h2_min": 0.1,
    "h2_max": 3.0,
    "h2_steps": 20,
    "sizes": [80, 100, 150, 200, 250],
    "t_max": 50.0,
    "dt": 0.1,
    "avg_window": None,
    "format": "csv",
    "output": None,
    "workers": None,
    "fermions": "auto",
    "cases": 20,
    "seed": 0,
}


@dataclass
class RunConfig:
    subcommand: str
    values: dict = field(default_factory=dict)

    def __getattr__(self, name):
        try:
            return self.values[name]
        except KeyError:
            raise AttributeError(name) from None


def _float_list(text):
    return [float(x) for x in str(text).split(",") if x.strip()]


def _int_list(text):
    return [int(x) for x in str(text).split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="squeezechain", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--delta", type=float)
    common.add_argument("--n-sites", type=int)
    common.add_argument("--output", help="data file; stdout when omitted")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--workers", type=int, help="worker processes (env SQUEEZECHAIN_WORKERS)")
    common.add_argument("--config", help="JSON file with default values for any flag")
    common.add_argument("--fermions", choices=("auto", "periodic", "antiperiodic"))

    p = sub.add_parser("ground-sweep", parents=[common], help="ground-state xi2 versus h")
    p.add_argument("--h-min", type=float)
    p.add_argument("--h-max", type=float)
    p.add_argument("--steps", type=int, help="number of field values")

    p = sub.add_parser("quench", parents=[common], help="trajectory after one quench")
    p.add_argument("--h1", type=float)
    p.add_argument("--h2", type=float)
    p.add_argument("--t-max", type=float)
    p.add_argument("--dt", type=float)

    p = sub.add_parser("average-sweep", parents=[common], help="long-time averages versus h2")
    p.add_argument("--h1", type=float)
    p.add_argument("--h2-min", type=float)
    p.add_argument("--h2-max", type=float)
    p.add_argument("--h2-steps", type=int, help="number of h2 values")
    p.add_argument("--avg-window", type=_float_list, help="t_min,t_max")
    p.add_argument("--dt", type=float)

    p = sub.add_parser("revival-scan", parents=[common], help="first revival time versus N")
    p.add_argument("--h1", type=float)
    p.add_argument("--h2", type=float)
    p.add_argument("--sizes", type=_int_list, help="comma-separated chain sizes")
    p.add_argument("--dt", type=float)

    p = sub.add_parser("oracle-check", parents=[common],
                       help="compare against exact diagonalization for N <= 8")
    p.add_argument("--cases", type=int, help="random cases per size")
    p.add_argument("--seed", type=int)
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Flags override the config file, which overrides the defaults."""
    values = dict(DEFAULTS)
    if args.config:
        try:
            with open(args.config) as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise InvalidParameters(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise InvalidParameters("config file must hold a JSON object")
        for key, val in loaded.items():
            key = key.replace("-", "_")
            if key not in DEFAULTS:
                raise InvalidParameters(f"unknown config key {key!r}")
            if key == "sizes" and isinstance(val, str):
                val = _int_list(val)
            if key == "avg_window" and isinstance(val, str):
                val = _float_list(val)
            values[key] = val
    for key, val in vars(args).items():
        if key in DEFAULTS and val is not None:
            values[key] = val
    values["workers"] = resolve_workers(values["workers"])
    keep = _relevant_keys(args.subcommand)
    return RunConfig(args.subcommand, {k: values[k] for k in keep})


def _relevant_keys(subcommand):
    base = ["delta", "n_sites", "format", "output", "workers", "fermions"]
    extra = {
        "ground-sweep": ["h_min", "h_max", "steps"],
        "quench": ["h1", "h2", "t_max", "dt"],
        "average-sweep": ["h1", "h2_min", "h2_max", "h2_steps", "avg_window", "dt"],
        "revival-scan": ["h1", "h2", "sizes", "dt"],
        "oracle-check": ["cases", "seed"],
    }[subcommand]
    return base + extra


def _linspace(lo, hi, count, label):
    if count < 1 or hi < lo or (count == 1 and hi != lo) or (count > 1 and hi == lo):
        raise InvalidParameters(f"empty or inconsistent {label} range [{lo}, {hi}] with {count} values")
    return np.linspace(lo, hi, count)


def cmd_ground_sweep(cfg: RunConfig):
    params = ModelParams(cfg.n_sites, cfg.delta)
    h = _linspace(cfg.h_min, cfg.h_max, cfg.steps, "h")
    if np.any(h < 0):
        raise InvalidParameters("fields must be >= 0")
    curve = ground_state_sweep(params, h, workers=cfg.workers)
    return ["h", "xi2"], curve.tolist(), None


def cmd_quench(cfg: RunConfig):
    params = ModelParams(cfg.n_sites, cfg.delta)
    if not (cfg.t_max > 0 and cfg.dt > 0):
        raise InvalidParameters("t_max and dt must be positive")
    q = make_quench(params, cfg.h1, cfg.h2, cfg.fermions)
    traj = evolve(params, q, uniform_grid(0.0, cfg.t_max, cfg.dt), workers=cfg.workers)
    rows = np.column_stack((traj.times, traj.xi2, traj.var_jz, traj.mz)).tolist()
    return ["t", "xi2", "var_jz", "mz"], rows, None


def cmd_average_sweep(cfg: RunConfig):
    params = ModelParams(cfg.n_sites, cfg.delta)
    h2 = _linspace(cfg.h2_min, cfg.h2_max, cfg.h2_steps, "h2")
    window = cfg.avg_window
    if window is not None and len(window) != 2:
        raise InvalidParameters("avg-window takes two numbers: t_min,t_max")
    if not cfg.dt > 0:
        raise InvalidParameters("dt must be positive")
    curve = average_sweep(params, cfg.h1, h2, window=window, step=cfg.dt, workers=cfg.workers)
    rows = np.column_stack((curve.h2_values, curve.xi2_avg, curve.var_avg)).tolist()
    return ["h2", "xi2_avg", "var_avg"], rows, {"window": list(curve.window)}


def cmd_revival_scan(cfg: RunConfig):
    sizes = list(cfg.sizes)
    if len(sizes) < 3:
        raise InvalidParameters("revival scan needs at least 3 sizes for a fit")
    if min(sizes) < 2:
        raise InvalidParameters("sizes must be >= 2")
    found, times = [], []
    for n in sizes:
        try:
            times.append(revival_time(cfg.delta, cfg.h1, cfg.h2, n, dt=cfg.dt, workers=cfg.workers))
            found.append(n)
        except NoRevivalFound as exc:
            print(f"warning: N={n}: {exc}; excluded from the fit", file=sys.stderr)
    if len(found) < 2:
        raise NoRevivalFound("fewer than two sizes with a detected revival")
    fit = fit_through_origin(found, times)
    print(f"slope k = {fit.slope:.6f} +- {fit.slope_err:.6f}", file=sys.stderr)
    rows = [[int(n), float(t)] for n, t in zip(found, times)]
    return ["N", "T_rev"], rows, {"slope": fit.slope, "slope_err": fit.slope_err}


def cmd_oracle_check(cfg: RunConfig):
    from .correlators import correlators_at
    from .observables import magnetization, variance_jz, xi_squared
    from .oracle import reference_values
    from .quench import kernel_at

    sizes = [n for n in (4, 6, 8) if n <= cfg.n_sites] if cfg.n_sites <= 8 else [4, 6, 8]
    rng = np.random.default_rng(cfg.seed)
    rows = []
    for n in sizes:
        for _ in range(cfg.cases):
            delta, h1, h2, t = rng.uniform(0.05, 1.0), rng.uniform(0, 3), rng.uniform(0, 3), rng.uniform(0, 5)
            params = ModelParams(n, delta)
            kernel = kernel_at(make_quench(params, h1, h2, cfg.fermions), t)
            corrs = correlators_at(kernel)
            ref = reference_values(params, h1, h2, t, cfg.fermions)
            diffs = [np.abs(kernel.aa.imag - ref["aa_imag"]), np.abs(kernel.ab - ref["ab"]),
                     np.abs(kernel.ba - ref["ba"]), np.abs(kernel.density - ref["density"])]
            diffs += [np.abs(getattr(corrs, g) - ref[g]) for g in ("gxx", "gyy", "gxy", "gyx", "gzz")]
            diffs += [np.abs([xi_squared(corrs, n) - ref["xi2_site"],
                              variance_jz(kernel, corrs, n) - ref["var_jz"],
                              magnetization(kernel) - ref["mz"]])]
            rows.append([n, delta, h1, h2, t, float(max(np.max(d) for d in diffs))])
    worst = max(r[-1] for r in rows)
    print(f"oracle-check: {len(rows)} cases, max deviation {worst:.3e}", file=sys.stderr)
    return ["N", "delta", "h1", "h2", "t", "max_deviation"], rows, {"max_deviation": worst}


COMMANDS = {
    "ground-sweep": cmd_ground_sweep,
    "quench": cmd_quench,
    "average-sweep": cmd_average_sweep,
    "revival-scan": cmd_revival_scan,
    "oracle-check": cmd_oracle_check,
}


def _fmt(x):
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return format(float(x), ".17g")


def render(columns, rows, fmt: str) -> str:
    if fmt == "csv":
        lines = [",".join(columns)]
        lines += [",".join(_fmt(v) for v in row) for row in rows]
        return "\n".join(lines) + "\n"
    records = [dict(zip(columns, row)) for row in rows]
    return json.dumps(records, indent=1) + "\n"


def manifest(cfg: RunConfig, summary) -> dict:
    out = {"program": "squeezechain", "version": __version__,
           "subcommand": cfg.subcommand, "parameters": dict(cfg.values)}
    if summary:
        out["summary"] = summary
    return out


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        columns, rows, summary = COMMANDS[cfg.subcommand](cfg)
    except InvalidParameters as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except SqueezeChainError as exc:
        print(f"compute error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    text = render(columns, rows, cfg.format)
    meta = json.dumps(manifest(cfg, summary), indent=1, sort_keys=True) + "\n"
    if cfg.output:
        with open(cfg.output, "w", newline="\n") as fh:
            fh.write(text)
        with open(cfg.output + ".manifest.json", "w", newline="\n") as fh:
            fh.write(meta)
    else:
        sys.stdout.write(text)
        sys.stderr.write(meta)
    if cfg.subcommand == "oracle-check" and summary["max_deviation"] > ORACLE_TOL:
        return EXIT_MISMATCH
    return 0


if __name__ == "__main__":
    sys.exit(main())
