"""Tests for path simulation and random streams."""

import math

import numpy as np
import pytest

from hyphull.exceptions import InvalidConfigError
from hyphull.models import SimConfig
from hyphull.simulate import (
    bridge_max,
    compensated_cumsum,
    derive_key,
    halfplane_to_klein_path,
    path_stream,
    polar_to_klein_path,
    running_max,
    sample_exp_time,
    simulate_halfplane,
    simulate_polar,
    simulate_xi,
    splitmix64,
    time_grid,
    write_path_csv,
)


def test_splitmix64_reference_value() -> None:
    """Test the first splitmix64 output for state 0."""
    assert splitmix64(0) == 0xE220A8397B1DCDAF


def test_derive_key_separates_streams() -> None:
    """Test seeds, paths and streams give distinct keys."""
    keys = {
        derive_key(1, 0, "wy"),
        derive_key(1, 0, "wx"),
        derive_key(1, 1, "wy"),
        derive_key(2, 0, "wy"),
    }
    assert len(keys) == 4
    assert all(0 <= key < 1 << 64 for key in keys)


def test_unknown_stream_rejected() -> None:
    """Test stream names are validated."""
    with pytest.raises(InvalidConfigError):
        derive_key(1, 0, "nope")


def test_path_stream_is_replayable() -> None:
    """Test the same identity replays the same draws."""
    first = path_stream(9, 4, "radial").standard_normal(5)
    second = path_stream(9, 4, "radial").standard_normal(5)
    assert np.array_equal(first, second)


def test_time_grid_ends_at_horizon() -> None:
    """Test the grid has n_steps + 1 points and ends at t_end."""
    cfg = SimConfig(t_end=1.05, dt=0.1)
    grid = time_grid(cfg)
    assert len(grid) == cfg.n_steps + 1
    assert grid[0] == 0.0
    assert grid[-1] == 1.05


def test_compensated_cumsum(rng) -> None:
    """Test running sums of nonnegative increments are monotone and accurate."""
    increments = rng.random(1000) * 1e-3
    sums = compensated_cumsum(increments)
    assert sums[0] == 0.0
    assert np.all(np.diff(sums) >= 0)
    assert sums[-1] == pytest.approx(math.fsum(increments), rel=1e-14)


def test_halfplane_path_is_deterministic(small_sim) -> None:
    """Test a path depends only on its seed and index."""
    first = simulate_halfplane(small_sim)
    second = simulate_halfplane(small_sim)
    other = simulate_halfplane(small_sim.for_path(1))
    assert np.array_equal(first.x, second.x)
    assert np.array_equal(first.y, second.y)
    assert not np.array_equal(first.x, other.x)


def test_halfplane_height_is_exact(small_sim) -> None:
    """Test Y is stored as exp(W^Y - t / 2)."""
    path = simulate_halfplane(small_sim)
    assert np.array_equal(path.y, np.exp(path.wy - 0.5 * path.times))
    assert path.x[0] == 0.0
    assert path.y[0] == 1.0
    assert running_max(path) >= 0.0


def test_zero_noise_functional() -> None:
    """Test the noiseless path stays on the axis and xi_t approaches 1 - exp(-t)."""
    cfg = SimConfig(t_end=2.0, dt=0.01, noise=False)
    path = simulate_halfplane(cfg)
    assert np.all(path.x == 0.0)
    assert path.xi[-1] == pytest.approx(1.0 - math.exp(-2.0), rel=1e-4)


def test_xi_sample_matches_halfplane_path(small_sim) -> None:
    """Test the standalone xi draw reuses the half-plane W^Y stream."""
    assert simulate_xi(small_sim).xi_t == simulate_halfplane(small_sim).xi[-1]


def test_halfplane_klein_path(small_sim) -> None:
    """Test the Klein trajectory keeps the grid and stays in the disk."""
    path = simulate_halfplane(small_sim)
    klein = halfplane_to_klein_path(path)
    assert len(klein) == len(path.times)
    assert np.array_equal(klein.points[0], [0.0, 0.0])


def test_polar_path_lower_bound(small_sim) -> None:
    """Test R_t >= t / 2 + W_t on the grid and R stays positive after the start."""
    for drift in ("implicit", "explicit"):
        for reflect_first in (True, False):
            path = simulate_polar(small_sim, drift=drift, reflect_first=reflect_first)
            assert path.r[0] == 0.0
            assert np.all(path.r[1:] >= 1e-6)
            assert np.all(path.r >= 0.5 * path.times + path.w_radial - 1e-9)


def test_polar_entrance(small_sim) -> None:
    """Test the winding starts at the entrance time, on or off the grid."""
    path = simulate_polar(small_sim, s_entrance=1e-3)
    assert path.times[path.entrance_index] == 1e-3
    assert np.all(path.theta_winding[: path.entrance_index + 1] == 0.0)
    assert len(path.times) == small_sim.n_steps + 2

    snapped = simulate_polar(small_sim, s_entrance=0.5)
    assert len(snapped.times) == small_sim.n_steps + 1
    assert snapped.times[snapped.entrance_index] == 0.5
    assert 0.0 <= snapped.theta_entrance < 2 * math.pi


def test_polar_angles_frozen_before_entrance(small_sim) -> None:
    """Test the polar angle is the entrance angle until time s."""
    path = simulate_polar(small_sim, s_entrance=0.2)
    angles = path.angles
    assert np.allclose(angles[: path.entrance_index + 1], path.theta_entrance)


def test_polar_validation(small_sim) -> None:
    """Test polar settings are validated."""
    with pytest.raises(InvalidConfigError):
        simulate_polar(small_sim, r_floor=0.0)
    with pytest.raises(InvalidConfigError):
        simulate_polar(small_sim, s_entrance=1.0)
    with pytest.raises(InvalidConfigError):
        simulate_polar(small_sim, drift="midpoint")  # type: ignore[arg-type]


def test_polar_klein_path_radius(small_sim) -> None:
    """Test polar paths map to Klein radius tanh R."""
    path = simulate_polar(small_sim)
    klein = polar_to_klein_path(path)
    assert np.allclose(np.hypot(klein.points[:, 0], klein.points[:, 1]), np.tanh(path.r))


def test_exp_time_mean() -> None:
    """Test exponential horizons have mean 1 / lambda."""
    stream = path_stream(3, 0, "horizon")
    draws = [sample_exp_time(2.0, stream) for _ in range(20000)]
    assert min(draws) >= 0.0
    assert np.mean(draws) == pytest.approx(0.5, rel=0.03)


def test_exp_time_rate_validated() -> None:
    """Test nonpositive rates raise."""
    with pytest.raises(InvalidConfigError):
        sample_exp_time(0.0, path_stream(3, 0, "horizon"))


def test_write_path_csv(tmp_path, small_sim) -> None:
    """Test path dumps carry a header and one row per gridpoint."""
    halfplane = simulate_halfplane(small_sim)
    target = write_path_csv(halfplane, tmp_path / "halfplane.csv")
    lines = target.read_text().splitlines()
    assert lines[0] == "t,x,y,xi"
    assert len(lines) == len(halfplane.times) + 1

    polar = simulate_polar(small_sim)
    lines = write_path_csv(polar, tmp_path / "polar.csv").read_text().splitlines()
    assert lines[0] == "t,r,theta"
    assert len(lines) == len(polar.times) + 1


def test_bridge_max_covers_grid_max(small_sim) -> None:
    """Test the bridge maximum is replayable and never below the gridpoint maximum."""
    for index in range(20):
        cfg = small_sim.for_path(index)
        path = simulate_halfplane(cfg)
        peak = bridge_max(path, cfg)
        assert peak >= running_max(path)
        assert peak == bridge_max(path, cfg)
    assert derive_key(1, 0, "bridge") != derive_key(1, 0, "wx")


def test_bridge_max_without_noise() -> None:
    """Test the noiseless path has no peaks between gridpoints."""
    cfg = SimConfig(t_end=1.0, dt=0.01, noise=False)
    path = simulate_halfplane(cfg)
    assert bridge_max(path, cfg) == running_max(path) == 0.0


def test_height_is_a_martingale(small_sim) -> None:
    """Test E[Y_t] = 1."""
    heights = np.array(
        [simulate_halfplane(small_sim.for_path(index)).y[-1] for index in range(4000)]
    )
    stderr = heights.std(ddof=1) / math.sqrt(len(heights))
    assert abs(heights.mean() - 1.0) < 4 * stderr


def test_horizontal_second_moment_is_xi() -> None:
    """Test E[X_t^2] = E[xi_t] on paired paths."""
    sim = SimConfig(t_end=0.5, dt=0.01, seed=21)
    paths = [simulate_halfplane(sim.for_path(index)) for index in range(4000)]
    gaps = np.array([path.x[-1] ** 2 - path.xi[-1] for path in paths])
    stderr = gaps.std(ddof=1) / math.sqrt(len(gaps))
    assert abs(gaps.mean()) < 4 * stderr + 0.005


def test_running_max_matches_xi_root() -> None:
    """Test E[X*_t] = sqrt(2 / pi) E[sqrt(xi_t)] on paired paths."""
    sim = SimConfig(t_end=0.5, dt=0.01, seed=22)
    gaps = []
    for index in range(2000):
        cfg = sim.for_path(index)
        path = simulate_halfplane(cfg)
        gaps.append(bridge_max(path, cfg) - math.sqrt(2 / math.pi * path.xi[-1]))
    stderr = float(np.std(gaps, ddof=1)) / math.sqrt(len(gaps))
    assert abs(float(np.mean(gaps))) < 4 * stderr


def test_reflection_slack_stays_near_floor(small_sim) -> None:
    """Test the total reflection push stays within ten floors."""
    r_floor = 1e-6
    for index in range(20):
        path = simulate_polar(small_sim.for_path(index), r_floor=r_floor)
        assert 0.0 <= path.reflection_slack <= 10 * r_floor
