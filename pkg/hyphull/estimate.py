"""Monte Carlo estimators for hull perimeters, radii, moments and limit laws.

Every estimator evaluates a per-path kernel on path indices ``0..n-1`` and reduces the
ordered sample array with exactly rounded sums, so results do not depend on the number
of worker processes.
"""

from __future__ import annotations

import hashlib
import math
from collections.abc import Callable, Sequence
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from typing import Any, Literal

import numpy as np
import structlog
from scipy import stats

from hyphull.cauchy import cauchy_perimeter
from hyphull.exceptions import InvalidConfigError, NumericalError
from hyphull.exact import asymptotic_slope, exp_time_perimeter, xi_moment_limit
from hyphull.geometry import halfplane_radius_arrays
from hyphull.hull import convex_hull, edge_sum_perimeter
from hyphull.models import (
    TWO_PI,
    AngularRateResult,
    ConsistencyCheck,
    HalfPlanePath,
    KSResult,
    MCEstimate,
    QuadratureSpec,
    SimConfig,
)
from hyphull.simulate import (
    bridge_max,
    halfplane_to_klein_path,
    path_stream,
    sample_exp_time,
    simulate_halfplane,
    simulate_polar,
    simulate_xi,
)

logger = structlog.get_logger(__name__)

SQRT_8PI = math.sqrt(8.0 * math.pi)
AUDIT_STRIDE = 100
AUDIT_TOLERANCE = 1e-6
SEGMENT_SLACK = 1e-9
EXTRAPOLATION_STRIDE = 4
EXP_TIME_TAIL_MASS = 1e-8
JOINT_SIGMAS = 3.0
KS_MIN_HORIZON = 30.0
REFERENCE_LAWS = ("cauchy", "levy", "uniform-angle")

Sample = float | tuple[float, ...]
Kernel = Callable[[int], Sample]
RadiusModel = Literal["halfplane", "polar"]


def default_dt(t: float) -> float:
    """Step size used when none is given: 1e-3 up to t = 2, 2e-3 beyond."""
    return 1e-3 if t <= 2.0 else 2e-3


def independent_seed(seed: int, label: str) -> int:
    """Derive a 64-bit seed for one estimator from a root seed and a label."""
    digest = hashlib.sha256(f"{seed}:{label}".encode("ascii")).digest()
    return int.from_bytes(digest[:8], "big", signed=False)


def run_paths(kernel: Kernel, n: int, threads: int = 1) -> np.ndarray:
    """Evaluate a kernel on path indices 0..n-1, in index order.

    With ``threads > 1`` the indices are spread over a process pool; the kernel must be
    picklable (a module-level function or a ``functools.partial`` of one).
    """
    if threads <= 1:
        samples = [kernel(index) for index in range(n)]
    else:
        chunksize = max(1, n // (8 * threads))
        with ProcessPoolExecutor(max_workers=threads) as pool:
            samples = list(pool.map(kernel, range(n), chunksize=chunksize))
    return np.asarray(samples, dtype=float)


def _check_run(t: float, n: int) -> None:
    if not (math.isfinite(t) and t > 0):
        raise InvalidConfigError(f"horizon must be positive, got {t}")
    if n < 2:
        raise InvalidConfigError(f"need at least two paths, got n={n}")


def _summarize(
    label: str,
    horizon: float,
    samples: np.ndarray,
    sim: SimConfig,
    target: float | None = None,
    target_source: str | None = None,
    details: dict[str, float] | None = None,
) -> MCEstimate:
    values = samples.tolist()
    n = len(values)
    mean = math.fsum(values) / n
    variance = math.fsum((value - mean) ** 2 for value in values) / (n - 1)
    estimate = MCEstimate(
        label=label,
        horizon=horizon,
        n=n,
        mean=mean,
        stderr=math.sqrt(variance / n),
        seed=sim.seed,
        dt=sim.dt,
        target=target,
        target_source=target_source,
        details=details or {},
    )
    logger.info(
        "estimate_finished",
        label=label,
        horizon=horizon,
        n=n,
        mean=estimate.mean,
        stderr=estimate.stderr,
        details=estimate.details,
    )
    return estimate


def _thinned(path: HalfPlanePath, stride: int) -> HalfPlanePath:
    keep = np.arange(0, len(path.times), stride)
    if keep[-1] != len(path.times) - 1:
        keep = np.append(keep, len(path.times) - 1)
    return HalfPlanePath(
        times=path.times[keep],
        x=path.x[keep],
        y=path.y[keep],
        wy=path.wy[keep],
        xi=path.xi[keep],
    )


def _perimeter_sample(
    index: int, *, sim: SimConfig, t: float, q: QuadratureSpec, extrapolate: bool
) -> tuple[float, float]:
    path = simulate_halfplane(sim.for_path(index, t))
    hull = convex_hull(halfplane_to_klein_path(path))
    perimeter = edge_sum_perimeter(hull)
    radius = float(halfplane_radius_arrays(path.x[-1:], path.y[-1:])[0])
    if perimeter < 2.0 * radius - SEGMENT_SLACK * max(1.0, perimeter):
        raise NumericalError(
            f"path {index}: perimeter {perimeter!r} below twice the radius {radius!r}"
        )
    if index % AUDIT_STRIDE == 0:
        audited = cauchy_perimeter(hull, q)
        if abs(audited - perimeter) > AUDIT_TOLERANCE * max(1.0, perimeter):
            raise NumericalError(
                f"path {index}: Cauchy perimeter {audited!r} != edge sum {perimeter!r}"
            )
        logger.debug("cauchy_audit_passed", path_index=index, vertices=len(hull))
    if not extrapolate:
        return perimeter, perimeter
    coarse = edge_sum_perimeter(
        convex_hull(halfplane_to_klein_path(_thinned(path, EXTRAPOLATION_STRIDE)))
    )
    # The grid deficit is c sqrt(dt) + O(dt); the coarse hull sits at twice the deficit.
    return 2.0 * perimeter - coarse, perimeter


def _xstar_sample(index: int, *, sim: SimConfig, t: float) -> float:
    cfg = sim.for_path(index, t)
    return bridge_max(simulate_halfplane(cfg), cfg)


def _rb_sample(index: int, *, sim: SimConfig, t: float) -> float:
    return SQRT_8PI * math.sqrt(simulate_xi(sim.for_path(index, t)).xi_t)


def _exp_time_sample(
    index: int, *, sim: SimConfig, lam: float, cap: float
) -> tuple[float, float]:
    horizon = sample_exp_time(lam, path_stream(sim.seed, index, "horizon"))
    truncated = horizon > cap
    horizon = min(horizon, cap)
    if horizon <= 0.0:
        return 0.0, 0.0
    return _rb_sample(index, sim=sim, t=horizon), float(truncated)


def _radius_sample(
    index: int,
    *,
    sim: SimConfig,
    t: float,
    model: RadiusModel,
    r_floor: float,
    s_entrance: float,
) -> tuple[float, float]:
    cfg = sim.for_path(index, t)
    if model == "halfplane":
        path = simulate_halfplane(cfg)
        radii = halfplane_radius_arrays(path.x, path.y)
        times = path.times
    else:
        polar = simulate_polar(cfg, r_floor, s_entrance)
        radii, times = polar.r, polar.times
    late = radii[times >= min(1.0, t)]
    return float(radii[-1]), float(np.min(late))


def _xi_moment_sample(index: int, *, sim: SimConfig, t: float, p: float) -> float:
    return simulate_xi(sim.for_path(index, t)).xi_t ** p


def _limit_sample(index: int, *, sim: SimConfig, t: float) -> tuple[float, float]:
    path = simulate_halfplane(sim.for_path(index, t))
    return float(path.x[-1]), float(path.xi[-1])


def _angular_sample(
    index: int,
    *,
    sim: SimConfig,
    s: float,
    t_grid: tuple[float, ...],
    r_floor: float,
) -> tuple[float, float]:
    t_max = t_grid[-1]
    path = simulate_polar(sim.for_path(index, t_max), r_floor, s)
    winding = np.interp(t_grid, path.times, path.theta_winding)
    gaps = np.abs(winding[-1] - winding[:-1])
    usable = gaps > 0
    slope = math.nan
    if np.count_nonzero(usable) >= 2:
        slope = float(np.polyfit(np.asarray(t_grid[:-1])[usable], np.log(gaps[usable]), 1)[0])
    return slope, float(path.angles[-1])


def estimate_L_direct(
    t: float,
    n: int,
    sim: SimConfig,
    q: QuadratureSpec | None = None,
    *,
    threads: int = 1,
    extrapolate: bool = True,
) -> MCEstimate:
    """Mean hull perimeter from simulated half-plane paths mapped into the Klein disk.

    Perimeters are edge sums; every hundredth path is audited against the Cauchy
    formula and every path is checked against the segment bound L >= 2 R_t.

    A hull of gridpoints misses the excursions between them and falls short of the true
    perimeter by about c sqrt(dt). With ``extrapolate`` each path is also hulled on every
    fourth gridpoint and the two perimeters are combined to cancel that term. The plain
    gridpoint mean is kept in ``details["grid_mean"]``.

    Raises:
        InvalidConfigError: If ``t <= 0`` or ``n < 2``.
        NumericalError: If an audit or the segment bound fails.
        OutOfDomainError: If a path gets too close to the ideal boundary to be
            represented in Klein coordinates.
    """
    _check_run(t, n)
    logger.info("estimate_started", label="direct", horizon=t, n=n, threads=threads)
    kernel = partial(
        _perimeter_sample, sim=sim, t=t, q=q or QuadratureSpec(), extrapolate=extrapolate
    )
    samples = run_paths(kernel, n, threads)
    details = {
        "grid_mean": math.fsum(samples[:, 1].tolist()) / n,
        "extrapolation_stride": float(EXTRAPOLATION_STRIDE if extrapolate else 1),
    }
    return _summarize("direct", t, samples[:, 0], sim, details=details)


def estimate_Xstar(t: float, n: int, sim: SimConfig, *, threads: int = 1) -> MCEstimate:
    """Mean running maximum of X, counting the bridge peaks between gridpoints."""
    _check_run(t, n)
    logger.info("estimate_started", label="xstar", horizon=t, n=n, threads=threads)
    kernel = partial(_xstar_sample, sim=sim, t=t)
    return _summarize("xstar", t, run_paths(kernel, n, threads), sim)


def estimate_L_rb(t: float, n: int, sim: SimConfig, *, threads: int = 1) -> MCEstimate:
    """Conditioned perimeter estimator sqrt(8 pi) sqrt(xi_t), needing only W^Y."""
    _check_run(t, n)
    logger.info("estimate_started", label="rb", horizon=t, n=n, threads=threads)
    kernel = partial(_rb_sample, sim=sim, t=t)
    return _summarize("rb", t, run_paths(kernel, n, threads), sim)


def estimate_L_exp_time(lam: float, n: int, sim: SimConfig, *, threads: int = 1) -> MCEstimate:
    """Mean perimeter at an independent Exp(lam) horizon, each path run to its own time.

    Horizons are capped at the 1 - 1e-8 quantile; the number of capped paths and the
    capped probability mass are reported in ``details``.

    Raises:
        InvalidConfigError: If ``lam <= 0`` or ``n < 2``.
    """
    if not (math.isfinite(lam) and lam > 0):
        raise InvalidConfigError(f"lambda must be positive, got {lam}")
    _check_run(1.0 / lam, n)
    cap = -math.log(EXP_TIME_TAIL_MASS) / lam
    logger.info("estimate_started", label="exp-time", horizon=1.0 / lam, n=n, threads=threads)
    samples = run_paths(partial(_exp_time_sample, sim=sim, lam=lam, cap=cap), n, threads)
    target = exp_time_perimeter(lam)
    return _summarize(
        "exp-time",
        1.0 / lam,
        samples[:, 0],
        sim,
        target=target.value,
        target_source=target.source,
        details={
            "lambda": lam,
            "truncated": float(np.sum(samples[:, 1])),
            "truncation_mass": EXP_TIME_TAIL_MASS,
        },
    )


def estimate_radius(
    t: float,
    n: int,
    sim: SimConfig,
    *,
    model: RadiusModel = "halfplane",
    r_floor: float = 1e-6,
    s_entrance: float = 1e-3,
    threads: int = 1,
) -> MCEstimate:
    """Mean geodesic distance from the origin at time t.

    ``details["min_radius_after_1"]`` is the smallest radius seen on [1, t] over all
    paths.
    """
    _check_run(t, n)
    logger.info("estimate_started", label="radius", horizon=t, n=n, model=model)
    kernel = partial(
        _radius_sample, sim=sim, t=t, model=model, r_floor=r_floor, s_entrance=s_entrance
    )
    samples = run_paths(kernel, n, threads)
    slope = asymptotic_slope("radius")
    return _summarize(
        "radius",
        t,
        samples[:, 0],
        sim,
        target=slope.at(t),
        target_source=slope.source,
        details={"min_radius_after_1": float(np.min(samples[:, 1]))},
    )


def estimate_xi_moment(
    t: float, p: float, n: int, sim: SimConfig, *, threads: int = 1
) -> MCEstimate:
    """Mean of xi_t^p, with the large-time limit as target."""
    _check_run(t, n)
    if not p > 0:
        raise InvalidConfigError(f"moment order must be positive, got {p}")
    logger.info("estimate_started", label="xi-moment", horizon=t, n=n, p=p)
    limit = xi_moment_limit(p)
    samples = run_paths(partial(_xi_moment_sample, sim=sim, t=t, p=p), n, threads)
    return _summarize(
        "xi-moment",
        t,
        samples,
        sim,
        target=limit.at(t),
        target_source=limit.source,
        details={"p": p},
    )


def _ks(sample: np.ndarray, cdf: Callable[[np.ndarray], np.ndarray], reference: str) -> KSResult:
    result = stats.kstest(sample, cdf)
    return KSResult(
        statistic=float(result.statistic),
        p_value=float(result.pvalue),
        n=len(sample),
        reference=reference,
    )


def ks_test_limit_laws(
    t_large: float, n: int, sim: SimConfig, *, threads: int = 1
) -> tuple[KSResult, KSResult]:
    """KS statistics of X_t against the standard Cauchy law and of xi_t against the
    positive 1/2-stable law with CDF erfc(1 / sqrt(2 s)).

    Raises:
        InvalidConfigError: If ``t_large < 30``.
    """
    if t_large < KS_MIN_HORIZON:
        raise InvalidConfigError(f"limit-law tests need t >= {KS_MIN_HORIZON}, got {t_large}")
    _check_run(t_large, n)
    logger.info("ks_test_started", horizon=t_large, n=n, threads=threads)
    samples = run_paths(partial(_limit_sample, sim=sim, t=t_large), n, threads)
    return (
        _ks(samples[:, 0], stats.cauchy.cdf, "cauchy"),
        _ks(samples[:, 1], stats.levy.cdf, "levy"),
    )


def _reference_law(reference: str) -> Any:
    if reference == "cauchy":
        return stats.cauchy()
    if reference == "levy":
        return stats.levy()
    if reference == "uniform-angle":
        return stats.uniform(loc=0.0, scale=TWO_PI)
    raise InvalidConfigError(
        f"unknown reference law {reference!r}, expected one of {REFERENCE_LAWS}"
    )


def calibrate_ks_threshold(
    reference: str,
    n: int,
    seed: int,
    replicates: int = 200,
    quantile: float = 0.95,
) -> float:
    """Quantile of the KS statistic for n exact draws from the reference law."""
    law = _reference_law(reference)
    generator = np.random.Generator(np.random.Philox(key=independent_seed(seed, reference)))
    statistics = [
        stats.kstest(law.rvs(size=n, random_state=generator), law.cdf).statistic
        for _ in range(replicates)
    ]
    return float(np.quantile(statistics, quantile))


def angular_convergence_rate(
    n: int,
    sim: SimConfig,
    s: float,
    t_grid: Sequence[float],
    *,
    r_floor: float = 1e-6,
    threads: int = 1,
) -> AngularRateResult:
    """Per-path slopes of log|Theta_tmax - Theta_t| against t, with Theta_tmax as the
    limit proxy, and a uniformity test of the limiting angles.

    Paths whose winding never moves on the grid get a NaN slope.
    """
    grid = tuple(sorted(float(t) for t in t_grid))
    if len(grid) < 3 or grid[0] <= s:
        raise InvalidConfigError("t_grid needs at least three times after the entrance time")
    _check_run(grid[-1], n)
    logger.info("angular_rate_started", n=n, t_max=grid[-1], points=len(grid))
    kernel = partial(_angular_sample, sim=sim, s=s, t_grid=grid, r_floor=r_floor)
    samples = run_paths(kernel, n, threads)
    limits = samples[:, 1]
    return AngularRateResult(
        slopes=samples[:, 0],
        theta_limits=limits,
        uniform_ks=_ks(limits, _reference_law("uniform-angle").cdf, "uniform-angle"),
    )


def compare(
    left: MCEstimate, right: MCEstimate, sigmas: float = JOINT_SIGMAS
) -> ConsistencyCheck:
    """Difference of two independent estimates in units of their joint standard error."""
    return ConsistencyCheck(
        left=left.label,
        right=right.label,
        horizon=left.horizon,
        difference=left.mean - right.mean,
        joint_stderr=math.hypot(left.stderr, right.stderr),
        tolerance_sigmas=sigmas,
    )


def check_identities(
    t: float,
    n: int,
    sim: SimConfig,
    q: QuadratureSpec | None = None,
    *,
    threads: int = 1,
) -> tuple[list[MCEstimate], list[ConsistencyCheck]]:
    """Pairwise comparison of the direct, conditioned and 2 pi X* perimeter estimates.

    Each estimator draws from its own seed derived from ``sim.seed``. Returns the three
    estimates and the three comparisons.
    """

    def seeded(label: str) -> SimConfig:
        return sim.model_copy(update={"seed": independent_seed(sim.seed, label)})

    direct = estimate_L_direct(t, n, seeded("direct"), q, threads=threads)
    rb = estimate_L_rb(t, n, seeded("rb"), threads=threads)
    xstar = estimate_Xstar(t, n, seeded("xstar"), threads=threads).scaled(TWO_PI, "2pi-xstar")
    checks = [compare(direct, rb), compare(direct, xstar), compare(rb, xstar)]
    for check in checks:
        logger.info(
            "identity_checked",
            left=check.left,
            right=check.right,
            horizon=t,
            difference=check.difference,
            joint_stderr=check.joint_stderr,
            passed=check.passed,
        )
    return [direct, rb, xstar], checks


__all__ = [
    "angular_convergence_rate",
    "calibrate_ks_threshold",
    "check_identities",
    "compare",
    "default_dt",
    "estimate_L_direct",
    "estimate_L_exp_time",
    "estimate_L_rb",
    "estimate_Xstar",
    "estimate_radius",
    "estimate_xi_moment",
    "independent_seed",
    "ks_test_limit_laws",
    "run_paths",
]
