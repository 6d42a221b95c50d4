"""Command-line front end: ``qnl <experiment> [flags]``.

Writes a CSV (or JSON) data table and a JSON summary of metric rows.
Exit status is 0 when every metric passes, 1 when any fails, 2 on bad
flags, 3 on a parameter-domain error and 4 on an I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path
from typing import Any, Sequence

from . import experiments as ex

SCHEMA_VERSION = 1
DEFAULT_SEED = 20240601

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_DOMAIN, EXIT_IO = 0, 1, 2, 3, 4


def count(text: str) -> int:
    """Integer flag that also accepts forms like ``1e7``."""
    value = float(text)
    if not value.is_integer() or value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text!r}")
    return int(value)


def positive(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return value


def format_value(v: Any) -> str:
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, int) or (hasattr(v, "dtype") and getattr(v.dtype, "kind", "") in "iu"):
        return str(int(v))
    if isinstance(v, str):
        return v
    return repr(float(v))


def to_csv(columns: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    return buf.getvalue()


def events_csv(ensemble) -> str:
    return to_csv(["run", "time"], [(r, t) for r, s in enumerate(ensemble) for t in s.times])


def _plain(obj: Any) -> Any:
    """Convert to JSON-safe Python values; non-finite floats become null."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if hasattr(obj, "item"):
        obj = obj.item()
    if isinstance(obj, int):
        return obj
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    return obj


def summarize(result: ex.ExperimentResult, include_data: bool = False) -> dict[str, Any]:
    report = {
        "schema": SCHEMA_VERSION,
        "experiment": result.experiment,
        "params": result.params,
        "metrics": [m.as_dict() for m in result.metrics],
        "pass": result.passed,
    }
    if include_data:
        report["data"] = {"columns": result.columns, "rows": result.rows}
    return _plain(report)


def dump_json(report: dict[str, Any]) -> str:
    return json.dumps(report, indent=2, allow_nan=False) + "\n"


def validate_report(report: dict[str, Any]) -> None:
    """Raise ValueError unless ``report`` follows the summary schema."""
    if report.get("schema") != SCHEMA_VERSION:
        raise ValueError("unsupported schema version")
    if not isinstance(report.get("experiment"), str) or not isinstance(report.get("params"), dict):
        raise ValueError("experiment and params are required")
    metrics = report.get("metrics")
    if not isinstance(metrics, list) or not metrics:
        raise ValueError("metrics must be a non-empty list")
    keys = {"name", "estimate", "stderr", "target", "tolerance", "pass"}
    for row in metrics:
        if set(row) != keys or not isinstance(row["pass"], bool):
            raise ValueError(f"bad metric row {row!r}")


# ---------------------------------------------------------------- parser


def _stochastic(p: argparse.ArgumentParser, runs: int) -> None:
    p.add_argument("--runs", type=count, default=runs, help=f"ensemble size (default {runs})")
    p.add_argument("--workers", type=count, default=None, help="worker processes (default: QNL_THREADS or 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qnl", description="Quiet-light and point-process experiments.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=count, default=DEFAULT_SEED, help=f"master seed (default {DEFAULT_SEED})")
    common.add_argument("--out", type=Path, default=None, help="data file; summary goes to <out>.summary.json")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    sub = parser.add_subparsers(dest="experiment", required=True)

    p = sub.add_parser("pendulum", parents=[common], help="mark-weighted dissipation spectrum")
    _stochastic(p, 100)
    p.add_argument("--periods", type=count, default=10**7)
    p.add_argument("--M", type=positive, default=1.0, help="pendulum weight, kg")
    p.add_argument("--m", type=positive, default=1e-3, help="molecule mass, kg")
    p.add_argument("--pr", type=positive, default=0.01, help="pick-up probability per period")
    p.add_argument("--dz", type=positive, default=1e-6, help="drop per period, m")

    p = sub.add_parser("points", parents=[common], help="renewal bridge, thinning and superposition")
    _stochastic(p, 20)
    p.add_argument("--gamma", type=positive, default=2.0)
    p.add_argument("--horizon", type=positive, default=2.5e5)
    p.add_argument("--keep", type=positive, default=0.5, help="thinning keep probability")
    p.add_argument("--copies", type=count, default=50, help="streams merged in the superposition check")
    p.add_argument("--check", action="append", choices=("bridge", "thinning", "superposition"))

    p = sub.add_parser("darkroom", parents=[common], help="dark-room g, S and V")
    _stochastic(p, 20)
    p.add_argument("--tau-r", type=positive, default=5.0)
    p.add_argument("--horizon", type=positive, default=2e5)
    p.add_argument("--events", type=Path, default=None, help="also write the event times as run,time CSV")

    p = sub.add_parser("rabi", parents=[common], help="generalized Rabi ODE against the closed form")
    p.add_argument("--gamma", type=positive, action="append")
    p.add_argument("--a", type=positive, default=0.5)
    p.add_argument("--t-max", type=positive, default=50.0)
    p.add_argument("--points", type=count, default=501)

    p = sub.add_parser("waiting", parents=[common], help="waiting-time densities")
    p.add_argument("--gamma", type=positive, default=2.0)
    p.add_argument("--t-max", type=positive, default=20.0)
    p.add_argument("--points", type=count, default=401)

    p = sub.add_parser("circuit", parents=[common], help="tuned-circuit identities")
    p.add_argument("--L", type=positive, default=1e-6)
    p.add_argument("--C", type=positive, default=1e-9)
    p.add_argument("--G", type=positive, default=1e-5)
    p.add_argument("--omega-range", type=float, nargs=3, metavar=("LO", "HI", "N"), default=None)

    p = sub.add_parser("cstate", parents=[common], help="photocounts of C-state light")
    _stochastic(p, 20)
    p.add_argument("--voltage", type=positive, default=1.0)
    p.add_argument("--G", type=positive, default=1e-3)
    p.add_argument("--omega0", type=positive, default=1e15)
    p.add_argument("--events", type=positive, default=2e5, help="expected events per run")
    p.add_argument("--phase", type=float, default=1.0, help="rotated carrier phase, rad")

    p = sub.add_parser("cavity", parents=[common], help="isolated cavity with N atoms")
    p.add_argument("--atoms", type=count, default=20)
    p.add_argument("--jumps", type=count, default=10**7)
    p.add_argument("--small-atoms", type=count, default=2, help="second, small system (0 to skip)")
    p.add_argument("--small-jumps", type=count, default=10**6)
    p.add_argument("--spectrum-atoms", type=count, default=100, help="atoms for the spectrum check (0 to skip)")
    p.add_argument("--spectrum-jumps", type=count, default=4 * 10**6)

    p = sub.add_parser("integrals", parents=[common], help="reference integrals, cubic and bi-complex checks")
    p.add_argument("--cubics", type=count, default=200)
    return parser


def run_experiment(args: argparse.Namespace) -> ex.ExperimentResult:
    name = args.experiment
    if name == "pendulum":
        return ex.run_pendulum(args.runs, args.periods, args.seed, args.workers, args.M, args.m, args.pr, args.dz)
    if name == "points":
        checks = tuple(args.check) if args.check else ("bridge", "thinning", "superposition")
        return ex.run_points(args.runs, args.seed, args.workers, args.gamma, args.horizon, args.keep,
                             args.copies, checks)
    if name == "darkroom":
        return ex.run_darkroom(args.runs, args.seed, args.workers, args.tau_r, args.horizon)
    if name == "rabi":
        gammas = tuple(args.gamma) if args.gamma else (0.1, 1.0, 2.0, 10.0)
        return ex.run_rabi(gammas, args.t_max, args.points, args.a)
    if name == "waiting":
        return ex.run_waiting(args.gamma, args.t_max, args.points)
    if name == "circuit":
        return ex.run_circuit(args.L, args.C, args.G, tuple(args.omega_range) if args.omega_range else None,
                              seed=args.seed)
    if name == "cstate":
        return ex.run_cstate(args.runs, args.seed, args.workers, args.voltage, args.G, args.omega0,
                             args.events, args.phase)
    if name == "cavity":
        return ex.run_cavity(args.atoms, args.jumps, args.seed, args.small_atoms, args.small_jumps,
                             args.spectrum_atoms, args.spectrum_jumps)
    if name == "integrals":
        return ex.run_integrals(args.seed, args.cubics)
    raise ValueError(f"unknown experiment {name!r}")


def summary_path(out: Path) -> Path:
    return out.with_name(out.name + ".summary.json")


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        result = run_experiment(args)
    except (ValueError, ZeroDivisionError) as exc:
        print(f"qnl: {exc}", file=sys.stderr)
        return EXIT_DOMAIN

    summary = dump_json(summarize(result))
    if args.format == "csv":
        data = to_csv(result.columns, result.rows)
    else:
        data = dump_json(summarize(result, include_data=True))
    try:
        if args.out is None:
            sys.stdout.write(data if args.format == "json" else summary)
        else:
            args.out.parent.mkdir(parents=True, exist_ok=True)
            args.out.write_text(data, newline="")
            if args.format == "csv":
                summary_path(args.out).write_text(summary, newline="")
        events = getattr(args, "events", None)
        if isinstance(events, Path) and result.events is not None:
            events.write_text(events_csv(result.events), newline="")
    except OSError as exc:
        print(f"qnl: {exc}", file=sys.stderr)
        return EXIT_IO
    for m in result.metrics:
        if not m.passed:
            print(f"FAIL {m.name}: estimate {m.estimate!r}, target {m.target!r}", file=sys.stderr)
    return EXIT_OK if result.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
