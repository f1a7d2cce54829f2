"""hyphull - simulation and numerical checks for the convex hull of hyperbolic Brownian motion."""

__version__ = "0.1.0"

from hyphull.cauchy import cauchy_perimeter, cauchy_perimeter_poincare
from hyphull.hull import convex_hull, edge_sum_perimeter
from hyphull.log import configure_structlog
from hyphull.models import (
    ConvexPolygon,
    ExactValue,
    GeodesicPolar,
    HalfPlanePoint,
    KleinPoint,
    MCEstimate,
    PlanarPath,
    PoincarePoint,
    QuadratureSpec,
    SimConfig,
)

configure_structlog()

__all__ = [
    "ConvexPolygon",
    "ExactValue",
    "GeodesicPolar",
    "HalfPlanePoint",
    "KleinPoint",
    "MCEstimate",
    "PlanarPath",
    "PoincarePoint",
    "QuadratureSpec",
    "SimConfig",
    "cauchy_perimeter",
    "cauchy_perimeter_poincare",
    "convex_hull",
    "edge_sum_perimeter",
]
