"""Coordinate models of the hyperbolic plane and the exact transforms among them.

Every transform has an array kernel (``*_arrays``) working on numpy arrays of
coordinates, used for whole trajectories, and a model-level wrapper working on the
pydantic point types. All functions are pure.
"""

from __future__ import annotations

import math

import numpy as np

from hyphull.exceptions import OutOfDomainError
from hyphull.models import (
    DISK_TOLERANCE,
    GeodesicPolar,
    HalfPlanePoint,
    KleinPoint,
    PoincarePoint,
)

ArrayLike = np.ndarray | float


def _check_disk_arrays(u: np.ndarray, v: np.ndarray) -> None:
    if np.any(u * u + v * v >= 1.0 - DISK_TOLERANCE):
        raise OutOfDomainError("point lies on or outside the unit disk")


def _one_minus_square(radius: np.ndarray) -> np.ndarray:
    return (1.0 - radius) * (1.0 + radius)


def _artanh(radius: np.ndarray) -> np.ndarray:
    return 0.5 * (np.log1p(radius) - np.log1p(-radius))


def polar_to_halfplane_arrays(r: np.ndarray, theta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # cosh R - sinh R sin(theta) rewritten without cancellation near theta = pi/2.
    denominator = np.exp(-r) + 2.0 * np.sinh(r) * np.sin(math.pi / 4 - theta / 2) ** 2
    return np.sinh(r) * np.cos(theta) / denominator, 1.0 / denominator


def halfplane_to_poincare_arrays(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    denominator = x * x + (y + 1.0) ** 2
    return 2.0 * x / denominator, (x * x + y * y - 1.0) / denominator


def halfplane_y_forms(u: ArrayLike, v: ArrayLike) -> tuple[ArrayLike, ArrayLike]:
    """Both displayed expressions for the half-plane height of a disk point.

    Returns ``(1 - |z|^2) / d`` and ``2 (1 - v) / d - 1`` with ``d = u^2 + (1 - v)^2``.
    """
    denominator = u * u + (1.0 - v) ** 2
    return (1.0 - (u * u + v * v)) / denominator, 2.0 * (1.0 - v) / denominator - 1.0


def poincare_to_halfplane_arrays(u: np.ndarray, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    _check_disk_arrays(u, v)
    denominator = u * u + (1.0 - v) ** 2
    _, y = halfplane_y_forms(u, v)
    return 2.0 * u / denominator, y


def poincare_to_klein_arrays(points: np.ndarray) -> np.ndarray:
    """Apply f(z) = 2z / (1 + |z|^2) to an (n, 2) array."""
    squared = np.einsum("ij,ij->i", points, points)
    _check_disk_arrays(points[:, 0], points[:, 1])
    return points * (2.0 / (1.0 + squared))[:, None]


def klein_to_poincare_arrays(points: np.ndarray) -> np.ndarray:
    """Apply g(z) = z / (1 + sqrt(1 - |z|^2)) to an (n, 2) array."""
    radius = np.hypot(points[:, 0], points[:, 1])
    _check_disk_arrays(points[:, 0], points[:, 1])
    return points / (1.0 + np.sqrt(_one_minus_square(radius)))[:, None]


def halfplane_to_klein_arrays(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    u, v = halfplane_to_poincare_arrays(x, y)
    return poincare_to_klein_arrays(np.column_stack([u, v]))


def halfplane_radius_arrays(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Hyperbolic distance to (0, 1) from cosh R = 1 + (x^2 + (y - 1)^2) / (2y)."""
    excess = (x * x + (y - 1.0) ** 2) / (2.0 * y)
    return np.log1p(excess + np.sqrt(excess * (excess + 2.0)))


def poincare_distance_arrays(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Row-wise hyperbolic distance between two (n, 2) arrays of Poincare points."""
    gap = np.hypot(a[:, 0] - b[:, 0], a[:, 1] - b[:, 1])
    scale = np.sqrt(
        _one_minus_square(np.hypot(a[:, 0], a[:, 1]))
        * _one_minus_square(np.hypot(b[:, 0], b[:, 1]))
    )
    # arcosh(1 + 2 s^2) == 2 asinh(s), stable for nearby points.
    return 2.0 * np.arcsinh(gap / scale)


def polar_to_halfplane(p: GeodesicPolar) -> HalfPlanePoint:
    x, y = polar_to_halfplane_arrays(np.float64(p.r), np.float64(p.theta))
    return HalfPlanePoint(x=float(x), y=float(y))


def halfplane_to_poincare(p: HalfPlanePoint) -> PoincarePoint:
    u, v = halfplane_to_poincare_arrays(np.float64(p.x), np.float64(p.y))
    return PoincarePoint(u=float(u), v=float(v))


def poincare_to_halfplane(p: PoincarePoint) -> HalfPlanePoint:
    x, y = poincare_to_halfplane_arrays(np.float64(p.u), np.float64(p.v))
    return HalfPlanePoint(x=float(x), y=float(y))


def poincare_to_klein(p: PoincarePoint) -> KleinPoint:
    (u, v), = poincare_to_klein_arrays(p.as_array()[None, :])
    return KleinPoint(u=float(u), v=float(v))


def klein_to_poincare(q: KleinPoint) -> PoincarePoint:
    (u, v), = klein_to_poincare_arrays(q.as_array()[None, :])
    return PoincarePoint(u=float(u), v=float(v))


def geodesic_radius(p: PoincarePoint) -> float:
    """R = 2 artanh |p|."""
    return float(2.0 * _artanh(np.float64(p.radius)))


def klein_geodesic_radius(q: KleinPoint) -> float:
    """R = artanh |q|."""
    return float(_artanh(np.float64(q.radius)))


def hyp_distance(a: PoincarePoint, b: PoincarePoint) -> float:
    return float(poincare_distance_arrays(a.as_array()[None, :], b.as_array()[None, :])[0])
