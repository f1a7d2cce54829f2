"""Path generation for hyperbolic Brownian motion.

The half-plane scheme is the primary simulator: the height Y has a closed form in its
driving noise and X is a single stochastic integral. The geodesic polar scheme exists for
the radial and angular statistics and for figures.

Randomness is drawn from per-path counter-based streams, so a path depends only on
``(seed, path_index)`` and its configuration, never on which worker produced it.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Literal

import numpy as np
import structlog

from hyphull.exceptions import InvalidConfigError
from hyphull.geometry import halfplane_to_klein_arrays
from hyphull.models import (
    TWO_PI,
    UINT64_MAX,
    HalfPlanePath,
    PlanarPath,
    PolarPath,
    SimConfig,
    XiSample,
)

logger = structlog.get_logger(__name__)

STREAMS: dict[str, int] = {
    "wy": 1,
    "wx": 2,
    "radial": 3,
    "angular": 4,
    "entrance": 5,
    "horizon": 6,
    "bridge": 7,
}
CUMSUM_BLOCK = 256
# Above this radius coth(R) == 1 in double precision.
_FLAT_DRIFT_RADIUS = 20.0
_NEWTON_MAX_ITER = 50

DriftRule = Literal["implicit", "explicit"]


def splitmix64(value: int) -> int:
    """One round of the splitmix64 finalizer on a 64-bit unsigned integer."""
    z = (value + 0x9E3779B97F4A7C15) & UINT64_MAX
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & UINT64_MAX
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & UINT64_MAX
    return z ^ (z >> 31)


def derive_key(seed: int, path_index: int, stream: str) -> int:
    """Avalanche (seed, path_index, stream) into a 64-bit generator key."""
    if stream not in STREAMS:
        raise InvalidConfigError(f"unknown random stream {stream!r}")
    return splitmix64(splitmix64(splitmix64(seed) ^ path_index) ^ STREAMS[stream])


def path_stream(seed: int, path_index: int, stream: str) -> np.random.Generator:
    """Independent Philox generator for one named noise source of one path."""
    return np.random.Generator(np.random.Philox(key=derive_key(seed, path_index, stream)))


def time_grid(cfg: SimConfig) -> np.ndarray:
    """Uniform grid of step dt whose last point is exactly t_end."""
    times = np.arange(cfg.n_steps + 1, dtype=float) * cfg.dt
    times[-1] = cfg.t_end
    return times


def compensated_cumsum(increments: np.ndarray) -> np.ndarray:
    """Running sums starting at 0, with a Kahan carry between blocks.

    Blocks are summed with ``np.cumsum`` on top of a compensated running total, and the
    result is made nondecreasing for nonnegative increments.
    """
    sums = np.empty(len(increments) + 1)
    sums[0] = 0.0
    total, carry = 0.0, 0.0
    for begin in range(0, len(increments), CUMSUM_BLOCK):
        block = increments[begin : begin + CUMSUM_BLOCK]
        sums[begin + 1 : begin + 1 + len(block)] = total + np.cumsum(block)
        adjusted = math.fsum(block) - carry
        updated = total + adjusted
        carry = (updated - total) - adjusted
        total = updated
        sums[begin + len(block)] = total
    if np.all(increments >= 0):
        np.maximum.accumulate(sums, out=sums)
    return sums


def _gaussian_increments(cfg: SimConfig, stream: str, steps: np.ndarray) -> np.ndarray:
    if not cfg.noise:
        return np.zeros(len(steps))
    draws = path_stream(cfg.seed, cfg.path_index, stream).standard_normal(len(steps))
    return draws * np.sqrt(steps)


def _driving_noise(cfg: SimConfig, times: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """W^Y at the gridpoints and the exact height Y = exp(W^Y - t/2)."""
    dwy = _gaussian_increments(cfg, "wy", np.diff(times))
    wy = np.concatenate([[0.0], np.cumsum(dwy)])
    return wy, np.exp(wy - 0.5 * times)


def _xi_path(times: np.ndarray, y: np.ndarray) -> np.ndarray:
    squared = y * y
    return compensated_cumsum(0.5 * np.diff(times) * (squared[:-1] + squared[1:]))


def simulate_halfplane(cfg: SimConfig) -> HalfPlanePath:
    """Simulate (X, Y) in the upper half-plane from (0, 1).

    Y is stored exactly as exp(W^Y - t/2); X follows the Euler-Maruyama rule
    dX = Y dW^X with W^X independent of W^Y; xi is the trapezoid integral of Y^2.
    """
    times = time_grid(cfg)
    wy, y = _driving_noise(cfg, times)
    dwx = _gaussian_increments(cfg, "wx", np.diff(times))
    x = np.concatenate([[0.0], np.cumsum(y[:-1] * dwx)])
    return HalfPlanePath(times=times, x=x, y=y, wy=wy, xi=_xi_path(times, y))


def running_max(path: HalfPlanePath) -> float:
    """Running maximum X* of the horizontal coordinate over the grid."""
    return float(np.max(path.x))


def bridge_max(path: HalfPlanePath, cfg: SimConfig) -> float:
    """Running maximum X* with the Brownian-bridge maximum sampled inside every step.

    Over a step X moves as Brownian motion with the frozen scale Y_i, so given both
    endpoints a, b its maximum is exactly (a + b + sqrt((b - a)^2 - 2 Y_i^2 dt log U)) / 2
    for U uniform on (0, 1], drawn from the path's "bridge" stream.
    """
    if not cfg.noise or len(path.x) < 2:
        return running_max(path)
    steps = np.diff(path.times)
    uniforms = 1.0 - path_stream(cfg.seed, cfg.path_index, "bridge").random(len(steps))
    start, end = path.x[:-1], path.x[1:]
    spread = (end - start) ** 2 - 2.0 * path.y[:-1] ** 2 * steps * np.log(uniforms)
    peaks = 0.5 * (start + end + np.sqrt(spread))
    return max(running_max(path), float(np.max(peaks)))


def simulate_xi(cfg: SimConfig) -> XiSample:
    """Draw xi_t = int_0^t exp(2 W_s - s) ds from the same W^Y stream as the half-plane path."""
    times = time_grid(cfg)
    _, y = _driving_noise(cfg, times)
    return XiSample(t=cfg.t_end, xi_t=float(_xi_path(times, y)[-1]))


def _grid_with_entrance(cfg: SimConfig, s_entrance: float) -> tuple[np.ndarray, int]:
    times = time_grid(cfg)
    nearest = int(np.argmin(np.abs(times - s_entrance)))
    if abs(times[nearest] - s_entrance) <= 1e-9 * cfg.dt:
        times[nearest] = s_entrance
        return times, nearest
    times = np.union1d(times, [s_entrance])
    return times, int(np.searchsorted(times, s_entrance))


def _implicit_radial_step(start: float, step: float) -> float:
    """Solve R - (step / 2) coth R = start for R > 0 by Newton's method.

    The left side is increasing and concave in R, so Newton started below the root from
    the Bessel-process solution climbs monotonically onto it.
    """
    if start > _FLAT_DRIFT_RADIUS:
        return start + 0.5 * step
    root = math.sqrt(start * start + 2.0 * step)
    radius = 0.5 * (start + root) if start >= 0 else step / (root - start)
    for _ in range(_NEWTON_MAX_ITER):
        sinh_r = math.sinh(radius)
        gap = radius - 0.5 * step / math.tanh(radius) - start
        update = gap / (1.0 + 0.5 * step / (sinh_r * sinh_r))
        radius -= update
        if abs(update) <= 1e-15 * max(1.0, radius):
            break
    return radius


def _explicit_radial_step(start: float, radius: float, step: float) -> float:
    if radius > _FLAT_DRIFT_RADIUS:
        return start + 0.5 * step
    return start + 0.5 * step / math.tanh(radius)


def simulate_polar(
    cfg: SimConfig,
    r_floor: float = 1e-6,
    s_entrance: float = 1e-3,
    *,
    drift: DriftRule = "implicit",
    reflect_first: bool = True,
) -> PolarPath:
    """Simulate the radial process R and the winding after time s from the origin.

    R follows dR = dt / (2 tanh R) + dW and is reflected at ``r_floor``. With
    ``reflect_first`` the floor is applied to R before each step; otherwise the noise is
    added first and the floor applied before the drift. ``drift="implicit"`` evaluates the
    drift at the new point, ``"explicit"`` is the plain Euler rule. From the entrance
    time on, the winding integrates dTheta = dW' / sinh R, and the entrance angle is
    uniform on [0, 2*pi).

    Raises:
        InvalidConfigError: If ``r_floor <= 0``, ``s_entrance`` is not inside
            (0, t_end) or the drift rule is unknown.
    """
    if not r_floor > 0:
        raise InvalidConfigError(f"r_floor must be positive, got {r_floor}")
    if not 0 < s_entrance < cfg.t_end:
        raise InvalidConfigError(f"s_entrance must lie in (0, {cfg.t_end}), got {s_entrance}")
    if drift not in ("implicit", "explicit"):
        raise InvalidConfigError(f"unknown drift rule {drift!r}")

    times, entrance = _grid_with_entrance(cfg, s_entrance)
    steps = np.diff(times)
    dw = _gaussian_increments(cfg, "radial", steps)
    dw_angular = _gaussian_increments(cfg, "angular", steps)

    radii = np.empty(len(times))
    winding = np.zeros(len(times))
    radii[0] = 0.0
    slack = 0.0
    radius = 0.0
    for i, (step, noise, noise_angular) in enumerate(
        zip(steps.tolist(), dw.tolist(), dw_angular.tolist())
    ):
        if reflect_first and radius < r_floor:
            slack += r_floor - radius
            radius = r_floor
        if i >= entrance:
            winding[i + 1] = winding[i] + noise_angular / math.sinh(max(radius, r_floor))
        start = radius + noise
        if not reflect_first and start < r_floor:
            slack += r_floor - start
            start = r_floor
        if drift == "implicit":
            radius = _implicit_radial_step(start, step)
        else:
            anchor = radius if reflect_first else start
            radius = _explicit_radial_step(start, max(anchor, r_floor), step)
        if radius < r_floor:
            slack += r_floor - radius
            radius = r_floor
        radii[i + 1] = radius

    theta_entrance = float(path_stream(cfg.seed, cfg.path_index, "entrance").uniform(0, TWO_PI))
    logger.debug(
        "polar_path_simulated",
        path_index=cfg.path_index,
        steps=len(steps),
        drift=drift,
        reflection_slack=slack,
    )
    return PolarPath(
        times=times,
        r=radii,
        theta_winding=winding,
        w_radial=np.concatenate([[0.0], np.cumsum(dw)]),
        theta_entrance=theta_entrance % TWO_PI,
        entrance_index=entrance,
        reflection_slack=slack,
    )


def sample_exp_time(lam: float, stream: np.random.Generator) -> float:
    """Draw an Exp(lam) horizon as -log(U) / lam with U uniform on (0, 1].

    Raises:
        InvalidConfigError: If ``lam <= 0``.
    """
    if not (math.isfinite(lam) and lam > 0):
        raise InvalidConfigError(f"lambda must be positive, got {lam}")
    return -math.log1p(-float(stream.random())) / lam


def halfplane_to_klein_path(path: HalfPlanePath) -> PlanarPath:
    return PlanarPath(points=halfplane_to_klein_arrays(path.x, path.y), times=path.times)


def polar_to_klein_path(path: PolarPath) -> PlanarPath:
    """Klein trajectory of a polar path: radius tanh R along the polar angle."""
    radius = np.tanh(path.r)
    angles = path.angles
    return PlanarPath(
        points=np.column_stack([radius * np.cos(angles), radius * np.sin(angles)]),
        times=path.times,
    )


def write_path_csv(path: HalfPlanePath | PolarPath, destination: Path) -> Path:
    """Dump a path as CSV with 17 significant digits.

    Half-plane paths use the header ``t,x,y,xi``; polar paths ``t,r,theta``.
    """
    if isinstance(path, HalfPlanePath):
        header = "t,x,y,xi"
        columns = np.column_stack([path.times, path.x, path.y, path.xi])
    else:
        header = "t,r,theta"
        columns = np.column_stack([path.times, path.r, path.angles])
    destination.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(destination, columns, fmt="%.17g", delimiter=",", header=header, comments="")
    logger.info("path_written", path=str(destination), rows=len(columns))
    return destination


__all__ = [
    "STREAMS",
    "bridge_max",
    "compensated_cumsum",
    "derive_key",
    "halfplane_to_klein_path",
    "path_stream",
    "polar_to_klein_path",
    "running_max",
    "sample_exp_time",
    "simulate_halfplane",
    "simulate_polar",
    "simulate_xi",
    "splitmix64",
    "time_grid",
    "write_path_csv",
]
