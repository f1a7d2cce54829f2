"""Command-line entry point for hyphull."""

from __future__ import annotations

import argparse
import sys
from collections.abc import Sequence

from pydantic import ValidationError

from hyphull import __version__
from hyphull.cli.commands import estimate, exact, figure, selftest
from hyphull.cli.services import EXIT_ERROR, EXIT_OK, EXIT_USAGE, logger
from hyphull.exceptions import HypHullError, InvalidConfigError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hyphull",
        description="Convex hulls of hyperbolic Brownian motion: simulation and exact values",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in (estimate, exact, figure, selftest):
        command.register(subparsers)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    """Parse arguments, dispatch the subcommand and map failures to exit codes.

    0 success, 1 usage error, 2 failed check, 3 numerical or domain error.
    """
    arguments = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(arguments)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    args.argv = arguments

    try:
        return int(args.handler(args))
    except (ValidationError, InvalidConfigError) as exc:
        print(f"hyphull {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except HypHullError as exc:
        logger.error(
            "command_failed",
            command=args.command,
            error_type=type(exc).__name__,
            error=str(exc),
        )
        print(f"hyphull {args.command}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
