"""Performance benchmarks using pytest-benchmark.

These tests measure the hot paths of the estimators to track performance
regressions over time.
"""

import numpy as np
import pytest

from hyphull.cauchy import cauchy_perimeter
from hyphull.hull import edge_sum_perimeter, hull_vertices
from hyphull.models import ConvexPolygon, SimConfig
from hyphull.simulate import simulate_halfplane, simulate_xi


@pytest.fixture
def cloud(disk_points) -> np.ndarray:
    return disk_points(20_000, 0.99)


@pytest.mark.benchmark(group="hull")
def test_hull_vertices_benchmark(benchmark, cloud):
    """Benchmark the monotone-chain hull of a large point cloud."""
    vertices = benchmark(hull_vertices, cloud)
    assert len(vertices) >= 3


@pytest.mark.benchmark(group="perimeter")
def test_edge_sum_benchmark(benchmark, cloud):
    """Benchmark the geodesic edge-sum perimeter."""
    poly = ConvexPolygon(vertices=hull_vertices(cloud))
    assert benchmark(edge_sum_perimeter, poly) > 0


@pytest.mark.benchmark(group="perimeter")
def test_cauchy_perimeter_benchmark(benchmark, disk_points):
    """Benchmark the Cauchy-formula perimeter of a moderate polygon."""
    poly = ConvexPolygon(vertices=hull_vertices(disk_points(200, 0.95)))
    assert benchmark(cauchy_perimeter, poly) > 0


@pytest.mark.benchmark(group="simulate")
def test_simulate_halfplane_benchmark(benchmark):
    """Benchmark one half-plane path of 10^4 steps."""
    cfg = SimConfig(t_end=10.0, dt=1e-3, seed=1)
    path = benchmark(simulate_halfplane, cfg)
    assert len(path.times) == cfg.n_steps + 1


@pytest.mark.benchmark(group="simulate")
def test_simulate_xi_benchmark(benchmark):
    """Benchmark the xi_t draw used by the conditioned estimator."""
    cfg = SimConfig(t_end=10.0, dt=1e-3, seed=1)
    assert benchmark(simulate_xi, cfg).xi_t > 0
