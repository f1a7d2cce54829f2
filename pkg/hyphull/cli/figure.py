"""SVG panels of a single polar path and its hyperbolic convex hull."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import structlog  # noqa: E402
from pydantic import BaseModel, ConfigDict  # noqa: E402
from matplotlib.axes import Axes  # noqa: E402
from matplotlib.figure import Figure  # noqa: E402

from hyphull.exceptions import InvalidConfigError  # noqa: E402
from hyphull.geometry import klein_to_poincare_arrays  # noqa: E402
from hyphull.hull import convex_hull  # noqa: E402
from hyphull.models import ConvexPolygon, PlanarPath, PolarPath, SimConfig  # noqa: E402
from hyphull.simulate import polar_to_klein_path, simulate_polar, write_path_csv  # noqa: E402

logger = structlog.get_logger(__name__)

EDGE_SAMPLES = 64
MAX_PLOT_POINTS = 20_000
PANEL_NAMES = ("radius", "winding", "klein", "poincare")

plt.rcParams["svg.hashsalt"] = "hyphull"


class FigureSet(BaseModel):
    """Files written by one figure run."""

    model_config = ConfigDict(frozen=True)

    panels: dict[str, Path]
    path_csv: Path
    hull: ConvexPolygon


def thin_indices(size: int, keep: np.ndarray, limit: int = MAX_PLOT_POINTS) -> np.ndarray:
    """Evenly strided indices of at most about ``limit`` points, always including ``keep``
    and both endpoints."""
    stride = max(1, size // limit)
    indices = np.concatenate([np.arange(0, size, stride), [size - 1], keep])
    return np.unique(indices.astype(np.int64))


def vertex_indices(path: PlanarPath, poly: ConvexPolygon) -> np.ndarray:
    """Positions of the hull vertices along the trajectory."""
    lookup = {tuple(point): index for index, point in enumerate(path.points.tolist())}
    return np.array([lookup[tuple(vertex)] for vertex in poly.vertices.tolist()], dtype=np.int64)


def geodesic_edges(poly: ConvexPolygon, samples: int = EDGE_SAMPLES) -> np.ndarray:
    """Closed hull boundary in the Poincare disk, ``samples`` points per Klein chord.

    Klein chords are sampled linearly and mapped by g, which traces the geodesic arcs.
    """
    vertices = poly.vertices
    if len(vertices) == 1:
        return klein_to_poincare_arrays(vertices)
    weights = np.linspace(0.0, 1.0, samples)[:, None]
    pieces = [
        (1.0 - weights) * start + weights * end
        for start, end in zip(vertices, np.roll(vertices, -1, axis=0))
    ]
    return klein_to_poincare_arrays(np.vstack(pieces))


def _unit_disk(ax: Axes) -> None:
    angles = np.linspace(0.0, 2.0 * np.pi, 721)
    ax.plot(np.cos(angles), np.sin(angles), color="0.6", linewidth=0.6)
    ax.set_aspect("equal")
    ax.set_xlim(-1.05, 1.05)
    ax.set_ylim(-1.05, 1.05)


def _save(fig: Figure, destination: Path, panel: str) -> Path:
    fig.savefig(destination, format="svg", metadata={"Date": None})
    plt.close(fig)
    logger.info("figure_written", panel=panel, path=str(destination))
    return destination


def _radius_panel(path: PolarPath, shown: np.ndarray, destination: Path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(path.times[shown], path.r[shown], linewidth=0.6)
    ax.set_xlabel("t")
    ax.set_ylabel("R_t")
    return _save(fig, destination, "radius")


def _winding_panel(path: PolarPath, shown: np.ndarray, destination: Path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    after = shown[shown >= path.entrance_index]
    ax.plot(path.times[after], path.theta_winding[after], linewidth=0.6)
    ax.set_xlabel("t")
    ax.set_ylabel("winding after s")
    return _save(fig, destination, "winding")


def _klein_panel(
    klein: PlanarPath, poly: ConvexPolygon, shown: np.ndarray, destination: Path
) -> Path:
    fig, ax = plt.subplots(figsize=(6, 6))
    _unit_disk(ax)
    ax.plot(klein.points[shown, 0], klein.points[shown, 1], linewidth=0.4, color="tab:blue")
    chords = np.vstack([poly.vertices, poly.vertices[:1]])
    ax.plot(chords[:, 0], chords[:, 1], linewidth=1.0, color="tab:red")
    ax.scatter(poly.vertices[:, 0], poly.vertices[:, 1], s=8, color="tab:red", zorder=3)
    return _save(fig, destination, "klein")


def _poincare_panel(
    klein: PlanarPath, poly: ConvexPolygon, shown: np.ndarray, destination: Path
) -> Path:
    fig, ax = plt.subplots(figsize=(6, 6))
    _unit_disk(ax)
    trajectory = klein_to_poincare_arrays(klein.points[shown])
    ax.plot(trajectory[:, 0], trajectory[:, 1], linewidth=0.4, color="tab:blue")
    boundary = geodesic_edges(poly)
    ax.plot(boundary[:, 0], boundary[:, 1], linewidth=1.0, color="tab:red")
    return _save(fig, destination, "poincare")


def render_figures(
    t: float,
    steps: int,
    s: float,
    seed: int,
    output_dir: Path,
    *,
    r_floor: float = 1e-6,
) -> FigureSet:
    """Simulate one polar path with ``steps`` Euler steps on [0, t] and write the four
    SVG panels plus a CSV dump of the path.

    Raises:
        InvalidConfigError: If ``steps`` is not positive.
    """
    if steps < 1:
        raise InvalidConfigError(f"steps must be positive, got {steps}")
    cfg = SimConfig(t_end=t, dt=t / steps, seed=seed)
    path = simulate_polar(cfg, r_floor=r_floor, s_entrance=s)
    klein = polar_to_klein_path(path)
    poly = convex_hull(klein)
    shown = thin_indices(len(path.times), vertex_indices(klein, poly))

    output_dir.mkdir(parents=True, exist_ok=True)
    panels = {
        "radius": _radius_panel(path, shown, output_dir / "radius.svg"),
        "winding": _winding_panel(path, shown, output_dir / "winding.svg"),
        "klein": _klein_panel(klein, poly, shown, output_dir / "klein.svg"),
        "poincare": _poincare_panel(klein, poly, shown, output_dir / "poincare.svg"),
    }
    path_csv = write_path_csv(path, output_dir / "path.csv")
    logger.info("figures_finished", horizon=t, steps=steps, hull_vertices=len(poly))
    return FigureSet(panels=panels, path_csv=path_csv, hull=poly)


__all__ = [
    "EDGE_SAMPLES",
    "PANEL_NAMES",
    "FigureSet",
    "geodesic_edges",
    "render_figures",
    "thin_indices",
    "vertex_indices",
]
