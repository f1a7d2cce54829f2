"""Convex hulls in the Klein disk and the edge-sum perimeter.

Hyperbolic geodesics are straight chords in the Klein model, so the Euclidean hull of a
set of Klein points is its hyperbolic convex hull.
"""

from __future__ import annotations

import math

import numpy as np

from hyphull.exceptions import EmptyPathError
from hyphull.geometry import klein_to_poincare_arrays, poincare_distance_arrays
from hyphull.models import ConvexPolygon, PlanarPath

HULL_BATCH = 4096
COLLINEAR_EPS = 1e-15
# Margin for discarding batch points that are certainly interior to the current hull.
_INTERIOR_MARGIN = 1e-12


def _cross(o: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    return float((a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]))


def _half_chain(points: np.ndarray) -> list[np.ndarray]:
    chain: list[np.ndarray] = []
    for point in points:
        while len(chain) >= 2 and _cross(chain[-2], chain[-1], point) <= COLLINEAR_EPS:
            chain.pop()
        chain.append(point)
    return chain


def _monotone_chain(points: np.ndarray) -> np.ndarray:
    """Counterclockwise hull vertices of an (n, 2) array, collinear points dropped."""
    ordered = np.unique(points, axis=0)
    if len(ordered) <= 2:
        return ordered
    lower = _half_chain(ordered)
    upper = _half_chain(ordered[::-1])
    return np.array(lower[:-1] + upper[:-1])


def _drop_interior(hull: np.ndarray, batch: np.ndarray) -> np.ndarray:
    if len(hull) < 3:
        return batch
    start = hull[:, None, :]
    edge = (np.roll(hull, -1, axis=0) - hull)[:, None, :]
    offset = batch[None, :, :] - start
    turns = edge[..., 0] * offset[..., 1] - edge[..., 1] * offset[..., 0]
    return batch[~np.all(turns > _INTERIOR_MARGIN, axis=0)]


def hull_vertices(points: np.ndarray, batch: int = HULL_BATCH) -> np.ndarray:
    """Hull of an (n, 2) array built batch by batch as hull(current hull + next batch).

    Raises:
        EmptyPathError: If there are no points.
    """
    if len(points) == 0:
        raise EmptyPathError("cannot hull an empty point set")
    hull = np.empty((0, 2))
    for begin in range(0, len(points), batch):
        candidates = _drop_interior(hull, points[begin : begin + batch])
        if len(candidates):
            hull = _monotone_chain(np.concatenate([hull, candidates]))
    return hull


def convex_hull(path: PlanarPath) -> ConvexPolygon:
    """Counterclockwise convex hull of a Klein-coordinate path.

    A single point gives a one-vertex polygon and a collinear set gives its two extreme
    points. Interior and collinear boundary points are not vertices.

    Raises:
        EmptyPathError: If the path has no points.
    """
    return ConvexPolygon(vertices=hull_vertices(path.points))


def edge_sum_perimeter(poly: ConvexPolygon) -> float:
    """Sum of geodesic edge lengths around the polygon, closing edge included.

    A segment is traversed on both sides, so its perimeter is twice its length.
    """
    if len(poly) == 1:
        return 0.0
    disk = klein_to_poincare_arrays(poly.vertices)
    lengths = poincare_distance_arrays(disk, np.roll(disk, -1, axis=0))
    return math.fsum(lengths)


__all__ = [
    "COLLINEAR_EPS",
    "HULL_BATCH",
    "convex_hull",
    "edge_sum_perimeter",
    "hull_vertices",
]
