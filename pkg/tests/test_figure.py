"""Tests for the figure panels."""

import numpy as np
import pytest
from pydantic import ValidationError

from hyphull.cli.figure import (
    PANEL_NAMES,
    geodesic_edges,
    render_figures,
    thin_indices,
    vertex_indices,
)
from hyphull.exceptions import InvalidConfigError
from hyphull.hull import convex_hull
from hyphull.models import ConvexPolygon, SimConfig
from hyphull.simulate import polar_to_klein_path, simulate_polar


def test_thin_indices_keeps_requested_points() -> None:
    """Test thinning keeps endpoints and forced indices."""
    keep = np.array([3, 501, 998])
    indices = thin_indices(1000, keep, limit=10)
    assert indices[0] == 0
    assert indices[-1] == 999
    assert set(keep.tolist()) <= set(indices.tolist())
    assert np.all(np.diff(indices) > 0)


def test_thin_indices_short_path() -> None:
    """Test short trajectories are not thinned."""
    assert np.array_equal(thin_indices(5, np.array([], dtype=np.int64)), np.arange(5))


def test_vertex_indices_locate_hull_vertices() -> None:
    """Test every hull vertex is found on the trajectory."""
    path = simulate_polar(SimConfig(t_end=1.0, dt=0.01, seed=4), s_entrance=0.05)
    klein = polar_to_klein_path(path)
    poly = convex_hull(klein)
    indices = vertex_indices(klein, poly)
    assert np.array_equal(klein.points[indices], poly.vertices)


def test_geodesic_edges_shape() -> None:
    """Test the boundary has one run of samples per edge and stays in the disk."""
    poly = ConvexPolygon(vertices=np.array([[0.0, 0.0], [0.5, 0.0], [0.0, 0.5]]))
    boundary = geodesic_edges(poly, samples=16)
    assert boundary.shape == (48, 2)
    assert np.all(np.hypot(boundary[:, 0], boundary[:, 1]) < 1.0)


def test_geodesic_edges_straight_through_origin() -> None:
    """Test a chord through the origin maps to a diameter."""
    poly = ConvexPolygon(vertices=np.array([[-0.5, 0.0], [0.5, 0.0]]))
    boundary = geodesic_edges(poly, samples=9)
    assert np.allclose(boundary[:, 1], 0.0)


def test_render_figures(tmp_path) -> None:
    """Test the four panels and the path dump are written."""
    figures = render_figures(1.0, 500, 0.01, 3, tmp_path)
    assert tuple(figures.panels) == PANEL_NAMES
    for panel in figures.panels.values():
        assert panel.read_text().lstrip().startswith("<?xml")
    assert figures.path_csv.read_text().splitlines()[0] == "t,r,theta"
    assert len(figures.hull) >= 1
    with pytest.raises(ValidationError):
        figures.path_csv = tmp_path


def test_render_figures_rejects_zero_steps(tmp_path) -> None:
    """Test the step count is validated."""
    with pytest.raises(InvalidConfigError):
        render_figures(1.0, 0, 0.01, 3, tmp_path)
