"""Tests for coordinate transforms and hyperbolic distances."""

import math

import numpy as np
import pytest

from hyphull.exceptions import OutOfDomainError
from hyphull.geometry import (
    geodesic_radius,
    halfplane_radius_arrays,
    halfplane_to_klein_arrays,
    halfplane_to_poincare,
    halfplane_to_poincare_arrays,
    halfplane_y_forms,
    hyp_distance,
    klein_geodesic_radius,
    klein_to_poincare,
    klein_to_poincare_arrays,
    poincare_distance_arrays,
    poincare_to_halfplane,
    poincare_to_halfplane_arrays,
    poincare_to_klein,
    poincare_to_klein_arrays,
    polar_to_halfplane,
)
from hyphull.models import GeodesicPolar, HalfPlanePoint, KleinPoint, PoincarePoint

ROUND_TRIP_POINTS = 10_000


def test_polar_origin_maps_to_base_point() -> None:
    """Test the origin of geodesic polar coordinates is (0, 1)."""
    point = polar_to_halfplane(GeodesicPolar(r=0.0))
    assert point.x == pytest.approx(0.0)
    assert point.y == pytest.approx(1.0)


def test_halfplane_base_point_maps_to_disk_center() -> None:
    """Test (0, 1) is the center of the Poincare disk."""
    point = halfplane_to_poincare(HalfPlanePoint(x=0.0, y=1.0))
    assert point.u == pytest.approx(0.0)
    assert point.v == pytest.approx(0.0)


@pytest.mark.parametrize("r,theta", [(0.3, 0.0), (2.0, 1.0), (5.0, 4.0), (1.0, math.pi / 2)])
def test_polar_coordinates_survive_to_the_disk(r: float, theta: float) -> None:
    """Test distance and angle are preserved through the half-plane."""
    disk = halfplane_to_poincare(polar_to_halfplane(GeodesicPolar(r=r, theta=theta)))
    assert geodesic_radius(disk) == pytest.approx(r, rel=1e-10)
    assert disk.angle == pytest.approx(theta, abs=1e-10)


def test_segment_radii() -> None:
    """Test radius 1/2 is log 3 in the Poincare disk and half that in the Klein disk."""
    assert geodesic_radius(PoincarePoint(u=0.5, v=0.0)) == pytest.approx(math.log(3.0))
    assert klein_geodesic_radius(KleinPoint(u=0.0, v=0.5)) == pytest.approx(0.5 * math.log(3.0))


def test_hyp_distance_from_center() -> None:
    """Test distance from the center matches the radius formula."""
    origin = PoincarePoint(u=0.0, v=0.0)
    point = PoincarePoint(u=0.5, v=0.0)
    assert hyp_distance(origin, point) == pytest.approx(math.log(3.0), rel=1e-14)
    assert hyp_distance(point, point) == 0.0


def test_hyp_distance_is_isometry_invariant() -> None:
    """Test rotating both points leaves the distance unchanged."""
    a = PoincarePoint(u=0.3, v=0.1)
    b = PoincarePoint(u=-0.2, v=0.6)
    angle = 0.7
    rotate = np.array([[math.cos(angle), -math.sin(angle)], [math.sin(angle), math.cos(angle)]])
    ra, rb = rotate @ a.as_array(), rotate @ b.as_array()
    rotated = hyp_distance(PoincarePoint(u=ra[0], v=ra[1]), PoincarePoint(u=rb[0], v=rb[1]))
    assert rotated == pytest.approx(hyp_distance(a, b), rel=1e-12)


def test_poincare_klein_round_trip(disk_points) -> None:
    """Test f and g invert each other in both directions."""
    disk = disk_points(ROUND_TRIP_POINTS, 0.999)
    back = klein_to_poincare_arrays(poincare_to_klein_arrays(disk))
    assert np.max(np.abs(back - disk)) <= 1e-12
    klein = disk_points(ROUND_TRIP_POINTS, 0.999)
    again = poincare_to_klein_arrays(klein_to_poincare_arrays(klein))
    assert np.max(np.abs(again - klein)) <= 1e-12
    point = PoincarePoint(u=0.2, v=-0.4)
    single = klein_to_poincare(poincare_to_klein(point))
    assert single.u == pytest.approx(point.u, abs=1e-15)
    assert single.v == pytest.approx(point.v, abs=1e-15)


def test_poincare_halfplane_round_trip(disk_points, rng) -> None:
    """Test the Cayley map and its inverse in both directions."""
    disk = disk_points(ROUND_TRIP_POINTS, 0.999)
    x, y = poincare_to_halfplane_arrays(disk[:, 0], disk[:, 1])
    assert np.all(y > 0)
    u, v = halfplane_to_poincare_arrays(x, y)
    assert np.max(np.abs(np.column_stack([u, v]) - disk)) <= 1e-12

    x = rng.uniform(-3.0, 3.0, ROUND_TRIP_POINTS)
    y = rng.uniform(0.1, 3.0, ROUND_TRIP_POINTS)
    x_back, y_back = poincare_to_halfplane_arrays(*halfplane_to_poincare_arrays(x, y))
    assert np.max(np.abs(x_back - x)) <= 1e-12
    assert np.max(np.abs(y_back - y)) <= 1e-12

    point = poincare_to_halfplane(PoincarePoint(u=0.0, v=0.0))
    assert point.x == pytest.approx(0.0)
    assert point.y == pytest.approx(1.0)


def test_poincare_to_klein_keeps_angles(disk_points) -> None:
    """Test the Klein map only rescales the radius."""
    disk = disk_points(ROUND_TRIP_POINTS, 0.999)
    klein = poincare_to_klein_arrays(disk)
    before = np.arctan2(disk[:, 1], disk[:, 0])
    after = np.arctan2(klein[:, 1], klein[:, 0])
    assert np.max(np.abs(after - before)) <= 1e-14
    assert np.all(np.hypot(klein[:, 0], klein[:, 1]) >= np.hypot(disk[:, 0], disk[:, 1]))


def test_cosh_distance_identity(disk_points) -> None:
    """Test cosh d = 1 + 2 |a - b|^2 / ((1 - |a|^2) (1 - |b|^2))."""
    a = disk_points(ROUND_TRIP_POINTS, 0.999)
    b = disk_points(ROUND_TRIP_POINTS, 0.999)
    gap = np.sum((a - b) ** 2, axis=1)
    expected = 1.0 + 2.0 * gap / ((1.0 - np.sum(a * a, axis=1)) * (1.0 - np.sum(b * b, axis=1)))
    assert np.allclose(np.cosh(poincare_distance_arrays(a, b)), expected, rtol=1e-10, atol=0)


def test_triangle_inequality(disk_points) -> None:
    """Test d(a, c) <= d(a, b) + d(b, c) on random triples."""
    a, b, c = (disk_points(1000, 0.99) for _ in range(3))
    direct = poincare_distance_arrays(a, c)
    detour = poincare_distance_arrays(a, b) + poincare_distance_arrays(b, c)
    assert np.all(direct <= detour * (1.0 + 1e-12))


def test_halfplane_height_forms_agree(disk_points) -> None:
    """Test both expressions of the half-plane height."""
    disk = disk_points(200, 0.9)
    first, second = halfplane_y_forms(disk[:, 0], disk[:, 1])
    assert np.allclose(first, second, rtol=1e-12)


def test_halfplane_radius_matches_disk_radius() -> None:
    """Test the half-plane distance formula against the disk radius."""
    x = np.array([0.0, 0.5, -3.0])
    y = np.array([1.0, 2.0, 0.1])
    radii = halfplane_radius_arrays(x, y)
    u, v = halfplane_to_poincare_arrays(x, y)
    expected = [geodesic_radius(PoincarePoint(u=a, v=b)) for a, b in zip(u, v)]
    assert radii[0] == 0.0
    assert np.allclose(radii, expected, rtol=1e-12)


def test_klein_points_of_halfplane_path() -> None:
    """Test half-plane points land inside the Klein disk at radius tanh R."""
    klein = halfplane_to_klein_arrays(np.array([0.0, 1.0]), np.array([math.e, 1.0]))
    assert np.hypot(*klein[0]) == pytest.approx(math.tanh(1.0))
    assert np.all(np.hypot(klein[:, 0], klein[:, 1]) < 1)


def test_distance_arrays_rowwise() -> None:
    """Test the array kernel works row by row."""
    a = np.array([[0.0, 0.0], [0.1, 0.1]])
    b = np.array([[0.5, 0.0], [0.1, 0.1]])
    assert np.allclose(poincare_distance_arrays(a, b), [math.log(3.0), 0.0])


def test_points_outside_disk_rejected() -> None:
    """Test array kernels refuse boundary points."""
    with pytest.raises(OutOfDomainError):
        poincare_to_klein_arrays(np.array([[1.0, 0.0]]))
    with pytest.raises(OutOfDomainError):
        klein_to_poincare_arrays(np.array([[0.0, 1.5]]))
