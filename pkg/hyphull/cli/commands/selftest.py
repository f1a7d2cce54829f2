"""``hyphull selftest``: fast deterministic checks of geometry, hulls and exact values."""

from __future__ import annotations

import argparse
import math
import sys
from typing import Any

import numpy as np

from hyphull.cauchy import cauchy_perimeter
from hyphull.cli.schemas import CheckOutcome
from hyphull.cli.services import EXIT_CHECK_FAILED, EXIT_OK, logger
from hyphull.exact import g_function, g_function_direct
from hyphull.geometry import (
    halfplane_to_poincare_arrays,
    klein_to_poincare_arrays,
    poincare_to_halfplane_arrays,
    poincare_to_klein_arrays,
)
from hyphull.hull import edge_sum_perimeter, hull_vertices
from hyphull.models import ConvexPolygon

SELFTEST_SEED = 7
ROUND_TRIP_POINTS = 10_000
ROUND_TRIP_RADIUS = 0.999
ROUND_TRIP_TOLERANCE = 1e-12
RANDOM_POLYGONS = 200
POLYGON_TOLERANCE = 1e-6
SEGMENT_TOLERANCE = 1e-8


def _random_disk_points(rng: np.random.Generator, size: int, max_radius: float) -> np.ndarray:
    radius = max_radius * np.sqrt(rng.random(size))
    angle = rng.uniform(0.0, 2.0 * math.pi, size)
    return np.column_stack([radius * np.cos(angle), radius * np.sin(angle)])


def check_round_trips(rng: np.random.Generator) -> CheckOutcome:
    """Poincare and Klein into each other and back, and Poincare to half-plane and back."""
    disk = _random_disk_points(rng, ROUND_TRIP_POINTS, ROUND_TRIP_RADIUS)
    klein_error = np.max(np.abs(klein_to_poincare_arrays(poincare_to_klein_arrays(disk)) - disk))
    klein = _random_disk_points(rng, ROUND_TRIP_POINTS, ROUND_TRIP_RADIUS)
    poincare_error = np.max(
        np.abs(poincare_to_klein_arrays(klein_to_poincare_arrays(klein)) - klein)
    )
    x, y = poincare_to_halfplane_arrays(disk[:, 0], disk[:, 1])
    u, v = halfplane_to_poincare_arrays(x, y)
    halfplane_error = np.max(np.abs(np.column_stack([u, v]) - disk))
    error = float(max(klein_error, poincare_error, halfplane_error))
    return CheckOutcome(
        name="geometry-round-trip",
        passed=error <= ROUND_TRIP_TOLERANCE,
        detail=f"{error:.3g}",
    )


def check_random_polygons(rng: np.random.Generator) -> CheckOutcome:
    """Cauchy-formula perimeter against the geodesic edge sum on random hulls."""
    worst = 0.0
    for _ in range(RANDOM_POLYGONS):
        size = int(rng.integers(3, 51))
        poly = ConvexPolygon(vertices=hull_vertices(_random_disk_points(rng, size, 0.999)))
        reference = edge_sum_perimeter(poly)
        error = abs(cauchy_perimeter(poly) - reference) / max(1.0, reference)
        worst = max(worst, error)
    return CheckOutcome(
        name="cauchy-vs-edge-sum",
        passed=worst <= POLYGON_TOLERANCE,
        detail=f"worst scaled error {worst:.3g}",
    )


def check_segment() -> CheckOutcome:
    """The segment from the origin to radius 1/2 has perimeter log 3."""
    poly = ConvexPolygon(vertices=np.array([[-0.5, 0.0], [0.0, 0.0]]))
    error = abs(cauchy_perimeter(poly) - math.log(3.0))
    return CheckOutcome(
        name="segment-log-3", passed=error <= SEGMENT_TOLERANCE, detail=f"{error:.3g}"
    )


def check_g_function() -> CheckOutcome:
    """G(3) equals pi^2 / 2 in both evaluation routes."""
    target = math.pi**2 / 2
    error = max(abs(g_function(3.0).value - target), abs(g_function_direct(3.0).value - target))
    return CheckOutcome(name="g-at-3", passed=error <= 1e-10, detail=f"{error:.3g}")


def run_selftest(seed: int = SELFTEST_SEED) -> list[CheckOutcome]:
    rng = np.random.Generator(np.random.Philox(key=seed))
    return [
        check_round_trips(rng),
        check_random_polygons(rng),
        check_segment(),
        check_g_function(),
    ]


def register(subparsers: Any) -> None:
    parser = subparsers.add_parser(
        "selftest",
        help="Run fast deterministic checks",
        description="Geometry round trips, Cauchy perimeters and G(3); exit 2 on failure",
    )
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    outcomes = run_selftest()
    for outcome in outcomes:
        status = "PASS" if outcome.passed else "FAIL"
        print(f"{status} {outcome.name}: {outcome.detail}")
    failed = [outcome.name for outcome in outcomes if not outcome.passed]
    logger.info("selftest_finished", checks=len(outcomes), failed=failed)
    if failed:
        print(f"selftest failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    return EXIT_OK
