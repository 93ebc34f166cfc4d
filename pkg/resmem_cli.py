#!/usr/bin/env python3
"""CLI tool for running reservoir memory experiments."""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from metrics_exporter import MetricReport, MetricsExporter
from metrics_exporter.utils import calculate_statistics
from resmem.core.config import settings
from resmem.core.exceptions import ResmemError
from resmem.harness import SweepSpec, get_preset, load_spec, preset_experiments, run_sweep
from resmem.netstats import calibrate_spectral_radius, path_length_report
from resmem.reservoir import load_adjacency_csv, make_adjacency, save_adjacency_csv


def _parse_seeds(text: str) -> List[int]:
    try:
        return [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed list {text!r}") from None


def _resolve_spec(target: str) -> SweepSpec:
    """A preset name or a path to a TOML sweep file."""
    path = Path(target)
    if path.suffix == ".toml" or path.exists():
        return load_spec(path)
    return get_preset(target)


def _print_summary(report: MetricReport):
    groups: dict = {}
    for row in report.rows:
        if row.status == "ok" and row.tau_or_index == 0:
            groups.setdefault((row.metric, row.variant), []).append(row.value)

    print(f"\n{'Metric':<32} {'Variant':<8} {'Mean':>14} {'Std':>12} {'N':>6}")
    print("-" * 76)
    for (metric, variant), values in groups.items():
        stats = calculate_statistics(values)
        print(
            f"{metric:<32} {variant:<8} "
            f"{stats.mean:>14.6g} {stats.std_dev:>12.4g} {stats.count:>6}"
        )
    if report.n_errors:
        print(f"\n✗ {report.n_errors} metric evaluations failed (see status/error columns)")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Reservoir Memory Experiment Tool")
    parser.add_argument("-v", "--verbose", action="store_true", help="Enable debug logging")

    subparsers = parser.add_subparsers(dest="command", help="Commands")

    # Run command
    run_parser = subparsers.add_parser("run", help="Run a preset or a TOML sweep file")
    run_parser.add_argument("target", help="Preset name or path to a .toml sweep file")
    run_parser.add_argument("--out", default=settings.output_dir, help="Output directory")
    run_parser.add_argument("--seeds", type=_parse_seeds, help="Comma-separated seeds")
    run_parser.add_argument(
        "--workers", type=int, default=settings.workers, help="Worker processes"
    )

    # Metrics command
    metrics_parser = subparsers.add_parser("metrics", help="Evaluate the metrics of a sweep file")
    metrics_parser.add_argument("--config", required=True, help="Path to a .toml sweep file")
    metrics_parser.add_argument("--out", help="Also write CSV and JSON to this directory")
    metrics_parser.add_argument("--workers", type=int, default=settings.workers)

    # Netstats command
    netstats_parser = subparsers.add_parser("netstats", help="Path lengths of an adjacency CSV")
    netstats_parser.add_argument("--matrix", required=True, help="Adjacency matrix CSV")
    netstats_parser.add_argument(
        "--target-lw", type=float, help="Also report the radius giving this <L_W>"
    )

    # Presets command
    subparsers.add_parser("presets", help="List preset experiments")

    # Matrix command
    matrix_parser = subparsers.add_parser("matrix", help="Write a random adjacency matrix CSV")
    matrix_parser.add_argument("--M", type=int, default=100, help="Number of nodes")
    matrix_parser.add_argument("--eta-f", type=float, default=1.0, help="Occupied fraction")
    matrix_parser.add_argument("--rho", type=float, default=1.0, help="Spectral radius")
    matrix_parser.add_argument("--seed", type=int, default=0)
    matrix_parser.add_argument("--out", required=True, help="Output CSV path")

    return parser


def _run(spec: SweepSpec, workers: int, out: Optional[str]):
    report = run_sweep(spec, workers=workers)
    if out:
        paths = MetricsExporter.write(report, out)
        print(f"✓ Wrote {paths['csv']} ({len(report.rows)} rows)")
        print(f"✓ Wrote {paths['json']}")
    _print_summary(report)


def main(argv: Optional[List[str]] = None):  # noqa: C901
    """Main CLI entry point."""
    parser = _build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else settings.logging_level,
        format=settings.log_format,
    )

    if not args.command:
        parser.print_help()
        return

    try:
        if args.command == "run":
            spec = _resolve_spec(args.target)
            if args.seeds:
                spec = spec.with_seeds(args.seeds)
            print(f"Running {spec.experiment} ({spec.grid.size} grid points)...")
            _run(spec, args.workers, spec.output or args.out)

        elif args.command == "metrics":
            spec = load_spec(args.config)
            print(f"Evaluating {spec.experiment} ({spec.grid.size} grid points)...")
            _run(spec, args.workers, args.out)

        elif args.command == "netstats":
            A = load_adjacency_csv(args.matrix)
            report = path_length_report(A)
            print(f"\n=== Network Statistics: {args.matrix} ===")
            print(f"Nodes: {A.M}")
            print(f"Occupied fraction: {A.eta_f:.4f}")
            print(f"Spectral radius: {A.spectral_radius:.6f}")
            print(f"Mean unweighted path length: {report.mean_unweighted:.6f}")
            print(f"Mean weighted path length: {report.mean_weighted:.6f}")
            print(f"Unreachable pairs: {report.unreachable_pairs}")
            if args.target_lw is not None:
                rho = calibrate_spectral_radius(A, args.target_lw)
                print(f"Spectral radius for <L_W> = {args.target_lw}: {rho:.9f}")

        elif args.command == "presets":
            print(f"\n{'Preset':<26} {'Points':>7}  Description")
            print("-" * 80)
            for name, spec in preset_experiments().items():
                print(f"{name:<26} {spec.grid.size:>7}  {spec.description}")

        elif args.command == "matrix":
            A = make_adjacency(args.M, args.eta_f, args.rho, args.seed)
            save_adjacency_csv(A, args.out)
            print(f"✓ Wrote {args.M}x{args.M} matrix (eta_f={A.eta_f:.4f}) to {args.out}")

    except (ResmemError, ValidationError, KeyError, FileNotFoundError) as e:
        print(f"✗ Error: {e}")
        sys.exit(1)


if __name__ == "__main__":
    main()
