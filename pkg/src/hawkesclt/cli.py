"""Command line interface.

Exit status: 0 when every check passes, 2 when a check fails and 1 on usage or
configuration errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .harness import (
    ExperimentConfig,
    Report,
    run_acceptance,
    run_clt_experiment,
    run_limit_comparison,
    self_similarity_check,
)
from .marks import make_marks
from .renewal import Grid, StepFunction, build_resolvent, limit_exponent, solve_g
from .simulator import block_rng, simulate_counts, simulate_hawkes
from .stable import LimitModel, simulate_limit_process

EXIT_OK, EXIT_USAGE, EXIT_FAIL = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_model_args(p, defaults=True):
    p.add_argument("--kernel", default=None, help="pareto | mittag-leffler | stable")
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--theta", type=float, default=None)
    p.add_argument("--marks", default=None, help="dirac | pareto | exponential | gamma")
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--shape", type=float, default=None)
    p.add_argument("--offspring", default=None, help="poisson | beta")
    p.add_argument("--mu", type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="YAML or JSON experiment config")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--out-dir", default=".")
    common.add_argument("--format", choices=["csv", "json"], default=None, help="output format (default: from the file suffix)")

    parser = _Parser(prog="hawkesclt", description=__doc__.splitlines()[0], parents=[common])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", parents=[common], help="simulate replicas of the process")
    _add_model_args(p)
    p.add_argument("--horizon", type=float, required=True)
    p.add_argument("--replicas", type=int, default=1)
    p.add_argument("--grid", default=None, help="comma list of times or a point count")
    p.add_argument("--out", default="counts.csv", help="events.csv or counts.csv")

    p = sub.add_parser("resolvent", parents=[common], help="tabulate R and I_R")
    _add_model_args(p)
    p.add_argument("--dt", type=float, required=True)
    p.add_argument("--horizon", type=float, required=True)
    p.add_argument("--out", default="table.csv")

    p = sub.add_parser("laplace-solve", parents=[common], help="deterministic Laplace functional")
    _add_model_args(p)
    p.add_argument("--f", default="indicator:0:1", help="indicator:lo:hi[:c]")
    p.add_argument("--scale", type=float, default=1.0, help="time scale T")
    p.add_argument("--norm", default="FT", help="FT for the model norming, or a number")
    p.add_argument("--cells", type=int, default=10_000)
    p.add_argument("--out", default="report.json")

    p = sub.add_parser("clt", parents=[common], help="Laplace convergence experiment")
    _add_model_args(p)
    p.add_argument("--T", default=None, help="comma list of time scales")
    p.add_argument("--replicas", type=int, default=None)
    p.add_argument("--out", default="clt_report.json")

    p = sub.add_parser("limit", parents=[common], help="simulate limit paths and compare")
    _add_model_args(p)
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--tmax", type=float, default=None)
    p.add_argument("--paths", type=int, default=None)
    p.add_argument("--compare-T", type=float, default=None, help="also compare with X_T at this T")
    p.add_argument("--replicas", type=int, default=None)
    p.add_argument("--out", default="limit_paths.csv")

    p = sub.add_parser("report", parents=[common], help="run the acceptance checks")
    p.add_argument("--criteria", default=None, help="comma list, e.g. 1,2,9")
    p.add_argument("--out", default="report.json")
    return parser


def _config(args) -> ExperimentConfig:
    data = {}
    if args.config:
        try:
            with open(args.config) as fh:
                data = yaml.safe_load(fh) or {}
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}") from exc
    cfg = ExperimentConfig.from_mapping(data) if data else None
    over = {}
    for key, field_name in (
        ("kernel", "kernel"),
        ("alpha", "alpha"),
        ("theta", "theta"),
        ("marks", "marks"),
        ("shape", "marks_shape"),
        ("offspring", "offspring"),
        ("mu", "mu"),
        ("seed", "seed"),
        ("replicas", "replicas"),
    ):
        val = getattr(args, key, None)
        if val is not None:
            over[field_name] = val
    if getattr(args, "beta", None) is not None:
        over["beta"] = args.beta
    elif getattr(args, "marks", None) and not args.marks.lower().startswith("pareto") and getattr(args, "offspring", None) in (None, "poisson"):
        over["beta"] = None
    base = {} if cfg is None else {k: getattr(cfg, k) for k in cfg.__dataclass_fields__}
    base.update(over)
    base["n_jobs"] = args.threads
    base["out_dir"] = args.out_dir
    return ExperimentConfig(**base)


def _out(args, name) -> Path:
    path = Path(args.out_dir) / name
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _format(args, path: Path) -> str:
    if args.format:
        return args.format
    return "json" if path.suffix.lower() == ".json" else "csv"


def _write_table(args, name, header, rows) -> Path:
    """Write rows as CSV, or as a JSON list of records with ``--format json``."""
    path = _out(args, name)
    if _format(args, path) == "json":
        path.write_text(json.dumps([dict(zip(header, r)) for r in rows]))
    else:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            w.writerows(rows)
    return path


def _parse_grid(spec, horizon):
    if spec is None:
        return np.array([horizon])
    if "," in spec:
        return np.array(sorted(float(v) for v in spec.split(",")))
    n = int(spec)
    if n < 1:
        raise UsageError("grid point count must be positive")
    return np.linspace(horizon / n, horizon, n)


def _parse_f(spec: str) -> StepFunction:
    parts = spec.split(":")
    if parts[0] != "indicator" or len(parts) not in (3, 4):
        raise UsageError("--f must look like indicator:lo:hi[:c]")
    lo, hi = float(parts[1]), float(parts[2])
    c = float(parts[3]) if len(parts) == 4 else 1.0
    if not 0 <= lo < hi:
        raise UsageError("indicator needs 0 <= lo < hi")
    if lo == 0:
        return StepFunction.indicator(hi, c)
    return StepFunction(np.array([0.0, lo, hi]), np.array([0.0, c]))


def cmd_simulate(args) -> int:
    cfg = _config(args)
    kern, law = cfg.kernel_obj(), cfg.offspring_law()
    marks = cfg.mark_law() if law.uses_marks else make_marks("dirac")
    grid = _parse_grid(args.grid, args.horizon)
    if grid[-1] > args.horizon:
        raise UsageError("grid exceeds the horizon")
    if "event" in Path(args.out).name:
        header = ["replica", "id", "parent", "generation", "time", "mark"]
        rows = []
        for r in range(cfg.replicas):
            out = simulate_hawkes(cfg.mu, args.horizon, kern, marks, law, block_rng(cfg.seed, r), record=True)
            rows += [[r, e.id, "" if e.parent is None else e.parent, e.generation, e.time, e.mark] for e in out.records]
    else:
        counts = simulate_counts(cfg.mu, grid, kern, marks, law, cfg.replicas, cfg.seed, n_jobs=cfg.n_jobs)
        header = ["replica", "t", "N"]
        rows = [[r, float(t), int(n)] for r in range(counts.shape[0]) for t, n in zip(grid, counts[r])]
    path = _write_table(args, args.out, header, rows)
    print(path)
    return EXIT_OK


def cmd_resolvent(args) -> int:
    cfg = _config(args)
    n = int(round(args.horizon / args.dt))
    if n < 1:
        raise UsageError("horizon must cover at least one cell")
    table = build_resolvent(cfg.kernel_obj(), Grid(args.dt, n))
    rows = [[row[0]] + [float(v) for v in row[1:]] for row in table.to_csv_rows()]
    path = _write_table(args, args.out, ["k", "t", "m", "r", "I_R"], rows)
    print(path)
    return EXIT_OK


def cmd_laplace_solve(args) -> int:
    cfg = _config(args)
    f = _parse_f(args.f)
    model = cfg.model()
    T = args.scale
    F_T = model.norming(T) if args.norm == "FT" else float(args.norm)
    fT = f.scaled(T, F_T)
    state = solve_g(fT, cfg.kernel_obj(), cfg.nonlinearity(), Grid.covering(fT.support, args.cells), mu=cfg.mu)
    target = cfg.mu * model.K * limit_exponent(f, model.alpha, model.power)
    result = {
        "config": {"f": args.f, "T": T, "F_T": F_T, "cells": args.cells, **cfg.__dict__},
        "exact_mean": state.exact_mean,
        "log_laplace": state.log_laplace,
        "centered_log_laplace": state.exact_log_laplace,
        "target": target,
        "rel_error": state.exact_log_laplace / target - 1.0 if target else None,
    }
    path = _out(args, args.out)
    if _format(args, path) == "csv":
        _write_table(args, args.out, ["key", "value"], [[k, v] for k, v in result.items() if k != "config"])
    else:
        path.write_text(json.dumps(result, indent=2, default=float))
    print(json.dumps({k: result[k] for k in ("centered_log_laplace", "target", "rel_error")}))
    return EXIT_OK


def _finish(report: Report, args) -> int:
    path = _out(args, args.out)
    if _format(args, path) == "csv":
        header = ["name", "measured", "target", "tol", "pass", "seconds"]
        rows = [[json.dumps(v, default=float) if isinstance(v, (dict, list)) else v for v in (c.name, c.measured, c.target, c.tol)]
                + [bool(c.passed), c.seconds] for c in report.checks]
        _write_table(args, args.out, header, rows)
    else:
        report.to_json(path)
    for c in report.checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}  measured={c.measured}  target={c.target}")
    return EXIT_OK if report.all_passed else EXIT_FAIL


def cmd_clt(args) -> int:
    cfg = _config(args)
    if args.T:
        cfg.T_grid = [float(v) for v in args.T.split(",")]
    return _finish(run_clt_experiment(cfg), args)


def cmd_limit(args) -> int:
    cfg = _config(args)
    for key, name in (("dt", "limit_dt"), ("tmax", "limit_tmax"), ("paths", "limit_paths")):
        if getattr(args, key) is not None:
            setattr(cfg, name, getattr(args, key))
    model: LimitModel = cfg.model()
    rng = np.random.default_rng([cfg.seed, 0])
    t, z = simulate_limit_process(model, cfg.limit_dt, cfg.limit_tmax, rng, cfg.limit_paths)
    rows = [[i, float(tj), float(zj)] for i in range(z.shape[0]) for tj, zj in zip(t, z[i])]
    _write_table(args, args.out, ["path_id", "t", "zeta"], rows)
    if args.compare_T is not None:
        report = run_limit_comparison(cfg, args.compare_T)
    else:
        report = Report(config=cfg.__dict__.copy())
        report.add(self_similarity_check(model, cfg.limit_paths, cfg.seed))
    args.out = Path(args.out).with_suffix(".json").name
    args.format = None
    return _finish(report, args)


def cmd_report(args) -> int:
    which = None
    if args.criteria:
        which = [int(v) for v in args.criteria.split(",")]
        if any(k < 1 or k > 11 for k in which):
            raise UsageError("criteria are numbered 1..11")
    return _finish(run_acceptance(n_jobs=args.threads, which=which), args)


COMMANDS = {
    "simulate": cmd_simulate,
    "resolvent": cmd_resolvent,
    "laplace-solve": cmd_laplace_solve,
    "clt": cmd_clt,
    "limit": cmd_limit,
    "report": cmd_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ValueError, KeyError) as exc:
        print(f"hawkesclt: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
