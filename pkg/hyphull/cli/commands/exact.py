"""``hyphull exact``: closed-form and quadrature reference values."""

from __future__ import annotations

import argparse
import csv
import sys
from collections.abc import Callable
from typing import Any

from hyphull.cli.services import EXIT_OK, format_float
from hyphull.exact import (
    euclidean_exp_time_perimeter,
    euclidean_perimeter,
    exp_time_average_of_exact,
    exp_time_perimeter,
    g_function,
    perimeter_exact,
    psi,
    xi_moment_limit,
)
from hyphull.models import ExactValue, QuadratureSpec

TABLE_COLUMNS = ["quantity", "argument", "value", "est_abs_err", "source"]


def _evaluate(args: argparse.Namespace) -> tuple[str, ExactValue]:
    quantity = args.quantity
    if quantity == "g":
        return f"x={args.x!r}", g_function(args.x)
    if quantity == "exp-time":
        return f"lambda={args.lam!r}", exp_time_perimeter(args.lam)
    if quantity == "euclid":
        return f"t={args.t!r}", euclidean_perimeter(args.t)
    if quantity == "euclid-exp":
        return f"lambda={args.lam!r}", euclidean_exp_time_perimeter(args.lam)
    if quantity == "xi-moment":
        return f"p={args.p!r}", xi_moment_limit(args.p)
    if quantity == "psi":
        spec = QuadratureSpec(abs_tol=args.abs_tol, max_panels=args.max_panels)
        return f"u={args.u!r};t={args.t!r}", psi(args.u, args.t, spec)
    if quantity == "perimeter":
        spec = QuadratureSpec(abs_tol=args.abs_tol, max_panels=args.max_panels)
        return f"t={args.t!r}", perimeter_exact(args.t, spec)
    return (
        f"lambda={args.lam!r}",
        exp_time_average_of_exact(args.lam, abs_tol=args.abs_tol, nodes=args.nodes),
    )


def _add_quantity(
    quantities: Any,
    name: str,
    help_text: str,
    *arguments: tuple[str, str, Callable[[str], Any], Any],
    abs_tol: float | None = None,
) -> None:
    parser = quantities.add_parser(name, help=help_text)
    for flag, dest, kind, default in arguments:
        parser.add_argument(flag, dest=dest, type=kind, default=default, required=default is None)
    if abs_tol is not None:
        parser.add_argument("--abs-tol", dest="abs_tol", type=float, default=abs_tol)
        parser.add_argument("--max-panels", dest="max_panels", type=int, default=4096)
    parser.set_defaults(quantity=name)


def register(subparsers: Any) -> None:
    parser = subparsers.add_parser(
        "exact",
        help="Evaluate an exact reference value",
        description="Print quantity,argument,value,est_abs_err,source for one exact value",
    )
    quantities = parser.add_subparsers(dest="quantity", required=True)
    _add_quantity(quantities, "g", "G(x) for x > 1", ("--x", "x", float, None))
    _add_quantity(
        quantities, "exp-time", "E L at an Exp(lambda) time", ("--lambda", "lam", float, None)
    )
    _add_quantity(
        quantities, "euclid", "Euclidean perimeter sqrt(8 pi t)", ("--t", "t", float, None)
    )
    _add_quantity(
        quantities,
        "euclid-exp",
        "Euclidean perimeter at an Exp(lambda) time",
        ("--lambda", "lam", float, None),
    )
    _add_quantity(quantities, "xi-moment", "Large-t form of E xi_t^p", ("--p", "p", float, None))
    _add_quantity(
        quantities,
        "psi",
        "Oscillatory kernel psi_u(t)",
        ("--u", "u", float, None),
        ("--t", "t", float, None),
        abs_tol=1e-9,
    )
    _add_quantity(
        quantities,
        "perimeter",
        "E L_t from the multiple-integral representation",
        ("--t", "t", float, None),
        abs_tol=1e-7,
    )
    exp_average = quantities.add_parser(
        "exp-average", help="Exp(lambda) average of the multiple-integral E L_t"
    )
    exp_average.add_argument("--lambda", dest="lam", type=float, default=1.0)
    exp_average.add_argument("--abs-tol", dest="abs_tol", type=float, default=1e-3)
    exp_average.add_argument("--nodes", type=int, default=8)
    exp_average.set_defaults(quantity="exp-average")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    argument, result = _evaluate(args)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(TABLE_COLUMNS)
    writer.writerow(
        [
            args.quantity,
            argument,
            format_float(result.value),
            format_float(result.est_abs_err),
            result.source,
        ]
    )
    return EXIT_OK
