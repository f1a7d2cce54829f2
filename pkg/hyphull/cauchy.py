"""Hyperbolic Cauchy formula: perimeter as the angular integral of a support functional."""

from __future__ import annotations

import math
from collections.abc import Sequence

import numpy as np
import structlog

from hyphull.geometry import poincare_to_klein_arrays
from hyphull.hull import hull_vertices
from hyphull.models import TWO_PI, ConvexPolygon, KleinPoint, PoincarePoint, QuadratureSpec
from hyphull.quadrature import integrate_adaptive

logger = structlog.get_logger(__name__)

SWITCH_SCAN_POINTS = 1024
SWITCH_ANGLE_WIDTH = 1e-13


def lambda_fn(phi: float, x: KleinPoint) -> float:
    """(x2 cos phi - x1 sin phi) / (1 - x1 cos phi - x2 sin phi) for a Klein point x."""
    cos_phi, sin_phi = math.cos(phi), math.sin(phi)
    return (x.v * cos_phi - x.u * sin_phi) / (1.0 - x.u * cos_phi - x.v * sin_phi)


def lambda_values(phi: np.ndarray, vertices: np.ndarray) -> np.ndarray:
    """Matrix of lambda_fn over angles (rows) and vertices (columns)."""
    cos_phi = np.cos(phi)[:, None]
    sin_phi = np.sin(phi)[:, None]
    x1, x2 = vertices[None, :, 0], vertices[None, :, 1]
    return (x2 * cos_phi - x1 * sin_phi) / (1.0 - x1 * cos_phi - x2 * sin_phi)


def support_values(phi: np.ndarray, poly: ConvexPolygon) -> np.ndarray:
    return np.max(lambda_values(np.atleast_1d(phi), poly.vertices), axis=1)


def support(phi: float, poly: ConvexPolygon) -> float:
    """Largest lambda_fn(phi, v) over the polygon vertices."""
    return float(support_values(np.array([phi]), poly)[0])


def _leader(phi: float, vertices: np.ndarray) -> int:
    return int(np.argmax(lambda_values(np.array([phi]), vertices)[0]))


def switch_angles(poly: ConvexPolygon, scan: int = SWITCH_SCAN_POINTS) -> list[float]:
    """Angles in (0, 2*pi) where the vertex attaining the support changes.

    A coarse scan brackets each change of arg-max; bisection then narrows the bracket and
    recovers vertices that lead only on an interval shorter than the scan spacing.
    """
    if len(poly) == 1:
        return []
    vertices = poly.vertices
    grid = np.linspace(0.0, TWO_PI, scan + 1)
    leaders = np.argmax(lambda_values(grid, vertices), axis=1)
    leaders[-1] = leaders[0]
    found: list[float] = []

    def bisect(a: float, b: float, lead_a: int, lead_b: int) -> None:
        if b - a < SWITCH_ANGLE_WIDTH:
            found.append(0.5 * (a + b))
            return
        middle = 0.5 * (a + b)
        lead_middle = _leader(middle, vertices)
        if lead_middle != lead_a:
            bisect(a, middle, lead_a, lead_middle)
        if lead_middle != lead_b:
            bisect(middle, b, lead_middle, lead_b)

    for i in np.flatnonzero(leaders[:-1] != leaders[1:]):
        bisect(float(grid[i]), float(grid[i + 1]), int(leaders[i]), int(leaders[i + 1]))
    return sorted(angle for angle in found if 0.0 < angle < TWO_PI)


def cauchy_perimeter(poly: ConvexPolygon, q: QuadratureSpec | None = None) -> float:
    """Perimeter of a convex polygon as the integral of its support over [0, 2*pi].

    Panels are split at the switch angles, where the integrand has kinks.

    Raises:
        ToleranceNotMetError: If ``q.max_panels`` panels do not reach ``q.abs_tol``.
    """
    if len(poly) == 1:
        return 0.0
    spec = q or QuadratureSpec()
    breakpoints = [0.0, *switch_angles(poly), TWO_PI]
    result = integrate_adaptive(lambda phi: support_values(phi, poly), breakpoints, spec)
    logger.debug(
        "cauchy_perimeter_evaluated",
        vertices=len(poly),
        panels=result.panels,
        abs_err=result.abs_err,
    )
    return max(result.value, 0.0)


def cauchy_perimeter_poincare(
    points: Sequence[PoincarePoint] | np.ndarray,
    q: QuadratureSpec | None = None,
) -> float:
    """Cauchy perimeter of the hull of Poincare-disk points, mapped into the Klein disk.

    Raises:
        EmptyPathError: If no points are given.
    """
    if isinstance(points, np.ndarray):
        disk = points.reshape(-1, 2)
    else:
        disk = np.array([point.as_array() for point in points]).reshape(-1, 2)
    klein = poincare_to_klein_arrays(disk) if len(disk) else disk
    return cauchy_perimeter(ConvexPolygon(vertices=hull_vertices(klein)), q)


__all__ = [
    "cauchy_perimeter",
    "cauchy_perimeter_poincare",
    "lambda_fn",
    "lambda_values",
    "support",
    "support_values",
    "switch_angles",
]
