"""Command-line entry point.

Verbs:
  bench           run the configured benchmark, write episodes.csv / summary.json / telemetry.json
  certify         evaluate certificates on a previous bench run's telemetry
  concentration   tail-frequency experiment against the polynomial bound
  validate-ladder build the configured parameter ladder and print every level check

Every verb takes ``--config PATH``; outputs go to ``--out DIR``. Exit code 0
on success; a named, expected error prints ``error: <ClassName>: message``
and exits 2.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .certificate import InvalidCountsError, InvalidLadderError
from .core import EmptyBeliefError, StateOutOfBoxError
from .corrected import BonusBelowLeafError
from .harness import (
    ConfigError,
    ExperimentConfig,
    MissingTelemetryError,
    load_config,
    run_benchmark,
    run_certificate_report_from_dir,
    run_concentration,
    run_ladder_report,
)
from .oracle import ImpossibleObservationError, OracleCapacityError
from .voronoi import NoCellsError

_EXPECTED_ERRORS = (
    ConfigError,
    MissingTelemetryError,
    InvalidLadderError,
    InvalidCountsError,
    OracleCapacityError,
    ImpossibleObservationError,
    EmptyBeliefError,
    StateOutOfBoxError,
    BonusBelowLeafError,
    NoCellsError,
    FileNotFoundError,
)


def _add_common(parser: argparse.ArgumentParser, out_required: bool = True) -> None:
    parser.add_argument("--config", required=True, help="experiment config (JSON)")
    parser.add_argument("--out", required=out_required, help="output directory")
    parser.add_argument("--plots", action="store_true", help="also render figures next to the CSV/JSON outputs")


def _apply_overrides(config: ExperimentConfig, args: argparse.Namespace) -> ExperimentConfig:
    changes = {}
    if getattr(args, "seed", None) is not None:
        changes["base_seed"] = args.seed
    if getattr(args, "episodes", None) is not None:
        changes["n_episodes"] = args.episodes
    return dataclasses.replace(config, **changes) if changes else config


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="voroplan", description="POMDP planning benchmarks and certificates")
    sub = parser.add_subparsers(dest="verb", required=True)

    bench = sub.add_parser("bench", help="run episodes and write benchmark artifacts")
    _add_common(bench)
    bench.add_argument("--seed", type=int, help="override base_seed")
    bench.add_argument("--episodes", type=int, help="override n_episodes")
    bench.add_argument("--jobs", type=int, default=1, help="worker processes (episodes are independent)")

    certify = sub.add_parser("certify", help="evaluate certificates on bench telemetry in --out")
    _add_common(certify)

    conc = sub.add_parser("concentration", help="tail-frequency experiment on a tabular env")
    _add_common(conc)
    conc.add_argument("--seed", type=int, help="override base_seed")
    conc.add_argument("--jobs", type=int, default=1, help="worker processes")

    ladder = sub.add_parser("validate-ladder", help="print per-level ladder checks")
    ladder.add_argument("--config", required=True, help="experiment config (JSON)")
    ladder.add_argument("--out", help="optional directory for ladder.json")
    return parser


def _cmd_bench(args: argparse.Namespace) -> int:
    config = _apply_overrides(load_config(args.config), args)
    summary = run_benchmark(config, args.out, jobs=args.jobs, plots=args.plots)
    print(
        f"{config.solver.name} on {config.env.name}: "
        f"mean return {summary['mean_return']:.6f} "
        f"(std {summary['std_return']:.6f}, stderr {summary['stderr_return']:.6f}) "
        f"over {summary['n_episodes']} episodes"
    )
    print(f"artifacts in {Path(args.out).resolve()}")
    return 0


def _cmd_certify(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    report = run_certificate_report_from_dir(config, args.out, plots=args.plots)
    print("confidence  mean_bound  estimation  partition")
    for row in report["rows"]:
        print(
            f"{row['confidence']:>10.2f}  {row['mean_bound']:>10.6f}  "
            f"{row['mean_estimation']:>10.6f}  {row['mean_partition']:>9.6f}"
        )
    if report["assumptions"]:
        print("assumptions: " + ", ".join(report["assumptions"]))
    return 0


def _cmd_concentration(args: argparse.Namespace) -> int:
    config = _apply_overrides(load_config(args.config), args)
    report = run_concentration(config, args.out, jobs=args.jobs, plots=args.plots)
    for entry in report["per_n"]:
        q = entry["error_quantiles"]
        print(
            f"n={entry['n_sims']}: median |error| {q['p50']:.6f} "
            f"(p90 {q['p90']:.6f}) over {entry['m_runs']} runs"
        )
        violations = [t for t in entry["tails"] if t["bound"] < 1.0 and t["slack"] < 0.0]
        print(f"   tail checks: {len(entry['tails'])} thresholds, {len(violations)} above bound+slack")
    return 0


def _cmd_validate_ladder(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    report = run_ladder_report(config)
    print(f"eta={report['eta']} beta0={report['beta0']} kappa={report['kappa']}")
    print(f"xi:    {report['xi']}")
    print(f"alpha: {report['alpha']}")
    print("level  xi            alpha        kappa*xi     (1-eta)*xi   ok")
    for row in report["levels"]:
        ok = row["lower_ok"] and row["upper_ok"] and row["chain_ok"]
        print(
            f"{row['level']:>5}  {row['xi']:<12.6g}  {row['alpha']:<11.6g}  "
            f"{row['lower']:<11.6g}  {row['upper']:<11.6g}  {'yes' if ok else 'NO'}"
        )
    print(f"eta preserved across levels: {'yes' if report['eta_preserved'] else 'NO'}")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "ladder.json", "w") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "bench": _cmd_bench,
        "certify": _cmd_certify,
        "concentration": _cmd_concentration,
        "validate-ladder": _cmd_validate_ladder,
    }
    try:
        return handlers[args.verb](args)
    except _EXPECTED_ERRORS as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
