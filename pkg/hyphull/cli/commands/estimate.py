"""``hyphull estimate``: Monte Carlo runs with CSV results and a replayable manifest."""

from __future__ import annotations

import argparse
import sys
import time
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, get_args

from hyphull import __version__
from hyphull.cli.config import OUTPUT_DIR, load_config_file, resolve_settings
from hyphull.cli.schemas import EstimateSettings, Estimator, RunManifest
from hyphull.cli.services import (
    EXIT_CHECK_FAILED,
    EXIT_OK,
    RunOutput,
    compare_results,
    logger,
    read_manifest,
    render_csv,
    run_with_refinement,
    write_manifest,
    write_results,
)

ESTIMATORS = list(get_args(Estimator))
FLAG_FIELDS = (
    "estimator",
    "t",
    "lam",
    "p",
    "n",
    "dt",
    "seed",
    "threads",
    "check",
    "model",
    "s",
    "r_floor",
    "abs_tol",
    "max_panels",
    "output",
)


def register(subparsers: Any) -> None:
    parser = subparsers.add_parser(
        "estimate",
        help="Run a Monte Carlo estimator",
        description="Run a Monte Carlo estimator and write results.csv and manifest.json",
    )
    parser.add_argument("--estimator", choices=ESTIMATORS, help="Estimator to run")
    parser.add_argument("--t", help="Horizon or comma-separated horizons")
    parser.add_argument("--lambda", dest="lam", help="Exp-time rate or comma-separated rates")
    parser.add_argument("--p", type=float, help="Moment order for xi-moment")
    parser.add_argument("--n", type=int, help="Number of paths")
    parser.add_argument("--dt", type=float, help="Euler step size")
    parser.add_argument("--seed", type=lambda value: int(value, 0), help="Root seed")
    parser.add_argument("--threads", type=int, help="Worker processes")
    parser.add_argument(
        "--check",
        action="store_const",
        const=True,
        default=None,
        help="Evaluate acceptance tolerances; exit 2 on failure",
    )
    parser.add_argument("--model", choices=["halfplane", "polar"], help="Radius simulator")
    parser.add_argument("--s", type=float, help="Entrance time of the winding")
    parser.add_argument("--r-floor", dest="r_floor", type=float, help="Reflection floor")
    parser.add_argument("--abs-tol", dest="abs_tol", type=float, help="Audit tolerance")
    parser.add_argument("--max-panels", dest="max_panels", type=int, help="Quadrature panels")
    parser.add_argument("--output", type=Path, help="Output directory")
    parser.add_argument("--config", type=Path, help="Flat key=value configuration file")
    parser.add_argument("--replay", type=Path, help="Manifest of a run to re-execute")
    parser.set_defaults(handler=run)


def _settings_from_args(args: argparse.Namespace) -> EstimateSettings:
    file_values = load_config_file(args.config) if args.config else None
    flags = {name: getattr(args, name, None) for name in FLAG_FIELDS}
    return EstimateSettings.model_validate(resolve_settings(flags, file_values))


def _report_checks(output: RunOutput) -> None:
    for check in output.checks:
        status = "PASS" if check.passed else "FAIL"
        print(f"{status} {check.name}: {check.detail}", file=sys.stderr)


def _replay(manifest_path: Path) -> int:
    manifest = read_manifest(manifest_path)
    settings = EstimateSettings.model_validate(manifest.config)
    output = run_with_refinement(settings)
    sys.stdout.write(render_csv(output.rows))
    mismatches = compare_results(manifest.results, output.rows)
    logger.info(
        "replay_compared",
        manifest=str(manifest_path),
        rows=len(output.rows),
        mismatches=mismatches,
    )
    if mismatches:
        print(f"replay mismatch: {', '.join(mismatches)}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    return EXIT_OK


def run(args: argparse.Namespace) -> int:
    if args.replay is not None:
        return _replay(args.replay)

    settings = _settings_from_args(args)
    started_at = datetime.now(timezone.utc)
    clock = time.perf_counter()
    logger.info("estimate_started", estimator=settings.estimator, seed=settings.seed)
    output = run_with_refinement(settings)
    elapsed = time.perf_counter() - clock

    output_dir = settings.output or OUTPUT_DIR
    write_results(output.rows, output_dir / "results.csv")
    manifest = RunManifest(
        command_line=list(getattr(args, "argv", [])),
        config=settings.snapshot(),
        seed=settings.seed,
        version=__version__,
        started_at=started_at,
        wall_clock_seconds=elapsed,
        results=output.rows,
        checks=output.checks,
    )
    write_manifest(manifest, output_dir / "manifest.json")

    sys.stdout.write(render_csv(output.rows))
    _report_checks(output)
    if not output.passed:
        failed = [check.name for check in output.checks if not check.passed]
        logger.warning("checks_failed", failed=failed)
        return EXIT_CHECK_FAILED
    return EXIT_OK
