"""Pytest configuration and fixtures for all tests."""

import os
from collections.abc import Callable

import numpy as np
import pytest

# Set environment variables before any imports that might use them
os.environ["HYPHULL_LOG_LEVEL"] = "WARNING"
os.environ["HYPHULL_LOG_FORMAT"] = "json"
os.environ.pop("HYPHULL_SEED", None)
os.environ.pop("HYPHULL_THREADS", None)

from hyphull.models import QuadratureSpec, SimConfig  # noqa: E402


@pytest.fixture
def rng() -> np.random.Generator:
    """Fixed-seed generator for random test geometry."""
    return np.random.Generator(np.random.Philox(key=12345))


@pytest.fixture
def quadrature() -> QuadratureSpec:
    return QuadratureSpec(abs_tol=1e-10, max_panels=4096)


@pytest.fixture
def small_sim() -> SimConfig:
    """Short horizon and coarse step for fast path tests."""
    return SimConfig(t_end=1.0, dt=0.01, seed=42)


@pytest.fixture
def disk_points(rng: np.random.Generator) -> Callable[[int, float], np.ndarray]:
    """Factory of uniform random points in a disk of the given radius."""

    def make(size: int, max_radius: float) -> np.ndarray:
        radius = max_radius * np.sqrt(rng.random(size))
        angle = rng.uniform(0.0, 2.0 * np.pi, size)
        return np.column_stack([radius * np.cos(angle), radius * np.sin(angle)])

    return make
