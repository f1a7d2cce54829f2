"""``hyphull figure``: SVG panels of one simulated polar path."""

from __future__ import annotations

import argparse
from pathlib import Path
from typing import Any

from hyphull.cli.config import OUTPUT_DIR, get_default_seed
from hyphull.cli.figure import render_figures
from hyphull.cli.services import EXIT_OK


def register(subparsers: Any) -> None:
    parser = subparsers.add_parser(
        "figure",
        help="Write SVG panels of a single path and its hull",
        description="Simulate one polar path and write R, winding, Klein and Poincare panels",
    )
    parser.add_argument("--t", type=float, default=10.0, help="Horizon")
    parser.add_argument("--steps", type=int, default=1_000_000, help="Euler steps on [0, t]")
    parser.add_argument("--s", type=float, default=1e-3, help="Entrance time of the winding")
    parser.add_argument("--seed", type=lambda value: int(value, 0), help="Root seed")
    parser.add_argument("--r-floor", dest="r_floor", type=float, default=1e-6)
    parser.add_argument("--output", type=Path, help="Output directory")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    seed = args.seed if args.seed is not None else get_default_seed()
    output_dir = args.output or OUTPUT_DIR / "figure"
    figures = render_figures(args.t, args.steps, args.s, seed, output_dir, r_floor=args.r_floor)
    for panel in figures.panels.values():
        print(panel)
    print(figures.path_csv)
    return EXIT_OK
