"""Closed-form and quadrature reference values for the estimators.

Every Gamma-function ratio is evaluated through log-gamma differences and exponentiated
once, so the large-lambda probes do not overflow.
"""

from __future__ import annotations

import math
import warnings
from typing import Literal

import numpy as np
import structlog
from scipy import optimize, special

from hyphull.exceptions import OscillationWarning, OutOfDomainError, ToleranceNotMetError
from hyphull.models import ExactValue, QuadratureSpec
from hyphull.quadrature import composite_rule, integrate_adaptive

logger = structlog.get_logger(__name__)

EXACT_MIN_HORIZON = 0.5
G_DIRECT_MAX = 20.0
PERIMETER_QUADRATURE = QuadratureSpec(abs_tol=1e-7, max_panels=4096)
_PSI_ROW_CHUNK = 4096
_BASE_OUTER_PANELS = 8
TRUNCATION_TIGHTENING = 100.0

AsymptoticQuantity = Literal["perimeter", "radius", "xstar"]


def _log_g(x_minus_1: float, x_plus_1: float) -> float:
    return (
        math.log(math.pi)
        + math.log(x_minus_1)
        - math.log(x_plus_1)
        + 2.0 * (special.gammaln(x_minus_1 / 4.0) - special.gammaln(x_plus_1 / 4.0))
    )


def g_function(x: float) -> ExactValue:
    """G(x) = pi ((x - 1) / (x + 1)) (Gamma((x - 1) / 4) / Gamma((x + 1) / 4))^2.

    Raises:
        OutOfDomainError: If ``x <= 1``.
    """
    if not (math.isfinite(x) and x > 1.0):
        raise OutOfDomainError(f"G is defined for x > 1, got {x}")
    return ExactValue(value=math.exp(_log_g(x - 1.0, x + 1.0)), source="gamma-ratio-G")


def g_function_direct(x: float) -> ExactValue:
    """G(x) from Gamma values directly, for the moderate range 1 < x <= 20."""
    if not 1.0 < x <= G_DIRECT_MAX:
        raise OutOfDomainError(f"direct evaluation needs 1 < x <= {G_DIRECT_MAX}, got {x}")
    ratio = special.gamma((x - 1.0) / 4.0) / special.gamma((x + 1.0) / 4.0)
    return ExactValue(
        value=float(math.pi * (x - 1.0) / (x + 1.0) * ratio * ratio),
        source="gamma-ratio-G-direct",
    )


def exp_time_perimeter(lam: float) -> ExactValue:
    """Expected perimeter at an independent Exp(lam) time, G(sqrt(8 lam + 1)).

    Raises:
        OutOfDomainError: If ``lam <= 0``.
    """
    if not (math.isfinite(lam) and lam > 0):
        raise OutOfDomainError(f"lambda must be positive, got {lam}")
    # sqrt(8 lam + 1) - 1 without cancellation for small lam.
    x_minus_1 = 8.0 * lam / (math.sqrt(8.0 * lam + 1.0) + 1.0)
    return ExactValue(value=math.exp(_log_g(x_minus_1, x_minus_1 + 2.0)), source="exp-time-G")


def euclidean_perimeter(t: float) -> ExactValue:
    """Expected perimeter of the planar Brownian hull, sqrt(8 pi t)."""
    if not t >= 0:
        raise OutOfDomainError(f"t must be nonnegative, got {t}")
    return ExactValue(value=math.sqrt(8.0 * math.pi * t), source="euclidean-hull")


def euclidean_exp_time_perimeter(lam: float) -> ExactValue:
    """Planar counterpart of exp_time_perimeter: pi sqrt(2 / lam)."""
    if not (math.isfinite(lam) and lam > 0):
        raise OutOfDomainError(f"lambda must be positive, got {lam}")
    return ExactValue(value=math.pi * math.sqrt(2.0 / lam), source="euclidean-exp-time")


def xi_moment_limit(p: float) -> ExactValue:
    """Large-time behaviour of E[xi_t^p].

    For 0 < p < 1/2 the moments converge to E[xi_inf^p] = 2^-p pi^-1/2 Gamma(1/2 - p),
    with xi_inf = 1 / (2 Gamma(1/2)). At p = 1/2 they grow linearly with slope
    (2 pi)^-1/2. For p > 1/2 they grow like
    2^-p Gamma(p - 1/2) / Gamma(2p - 1/2) exp(p (2p - 1) t).

    Raises:
        OutOfDomainError: If ``p <= 0``.
    """
    if not (math.isfinite(p) and p > 0):
        raise OutOfDomainError(f"moment order must be positive, got {p}")
    if p < 0.5:
        log_value = -p * math.log(2.0) - 0.5 * math.log(math.pi) + special.gammaln(0.5 - p)
        return ExactValue(value=math.exp(log_value), source="xi-moment-limit")
    if p == 0.5:
        return ExactValue(
            value=1.0 / math.sqrt(2.0 * math.pi), source="xi-moment-slope", scaling="linear"
        )
    log_value = -p * math.log(2.0) + special.gammaln(p - 0.5) - special.gammaln(2.0 * p - 0.5)
    return ExactValue(
        value=math.exp(log_value),
        source="xi-moment-growth",
        scaling="exponential",
        growth_rate=p * (2.0 * p - 1.0),
    )


def asymptotic_slope(quantity: AsymptoticQuantity) -> ExactValue:
    """Large-time linear growth rate of E L_t, E R_t or E X*_t."""
    slopes = {"perimeter": 2.0, "radius": 0.5, "xstar": 1.0 / math.pi}
    return ExactValue(value=slopes[quantity], source=f"{quantity}-slope", scaling="linear")


def _psi_cutoff(u: float, t: float, tol: float) -> float | None:
    """Smallest z beyond which exp(z - z^2 / 2t - u cosh z) stays below tol.

    Returns None when the bound holds on all of [0, inf).
    """
    log_tol = math.log(tol)

    def excess(z: float) -> float:
        return z * z / (2.0 * t) + u * math.cosh(z) - z + log_tol

    def slope(z: float) -> float:
        return z / t + u * math.sinh(z) - 1.0

    bottom = t if u == 0 else optimize.bisect(slope, 0.0, t, xtol=1e-14)
    if excess(bottom) >= 0:
        return None
    upper = max(2.0 * bottom, 1.0)
    while excess(upper) < 0:
        upper *= 2.0
    return float(optimize.bisect(excess, bottom, upper, xtol=1e-12))


def _lobe_edges(t: float, z_max: float) -> list[float]:
    edges = [k * t for k in range(int(z_max / t) + 1)]
    if z_max - edges[-1] > 1e-12 * t:
        edges.append(z_max)
    return edges


def _psi_integrand(z: np.ndarray, u: float, t: float) -> np.ndarray:
    return np.exp(-z * z / (2.0 * t) - u * np.cosh(z)) * np.sin(math.pi * z / t) * np.sinh(z)


def psi(
    u: float,
    t: float,
    q: QuadratureSpec | None = None,
    *,
    truncation_scale: float = 1.0,
) -> ExactValue:
    """psi_u(t) = int_0^inf exp(-z^2 / 2t) exp(-u cosh z) sin(pi z / t) sinh z dz.

    The range is cut where the envelope falls below ``abs_tol / 10``, stretched by
    ``truncation_scale``, and split at the zeros of the sine.

    Raises:
        OutOfDomainError: If ``u <= 0`` or ``t <= 0``.
        ToleranceNotMetError: If the panel budget is exhausted.
    """
    if not (u > 0 and t > 0):
        raise OutOfDomainError(f"psi needs u > 0 and t > 0, got u={u}, t={t}")
    if t < EXACT_MIN_HORIZON:
        warnings.warn(
            f"psi at t={t} oscillates faster than its envelope decays",
            OscillationWarning,
            stacklevel=2,
        )
    spec = q or QuadratureSpec()
    z_max = _psi_cutoff(u, t, spec.abs_tol / 10.0)
    if z_max is None:
        return ExactValue(value=0.0, source="psi-quadrature", est_abs_err=spec.abs_tol)
    result = integrate_adaptive(
        lambda z: _psi_integrand(z, u, t),
        _lobe_edges(t, truncation_scale * z_max),
        spec,
    )
    return ExactValue(value=result.value, source="psi-quadrature", est_abs_err=result.abs_err)


def _psi_matrix(
    u: np.ndarray, t: float, z_nodes: np.ndarray, z_weights: np.ndarray
) -> np.ndarray:
    """psi at many u values on one fixed composite rule in z."""
    # exp(z - z^2 / 2t) (1 - exp(-2z)) / 2 == exp(-z^2 / 2t) sinh z without overflow.
    base = (
        z_weights
        * np.exp(z_nodes - z_nodes * z_nodes / (2.0 * t))
        * (-0.5 * np.expm1(-2.0 * z_nodes))
        * np.sin(math.pi * z_nodes / t)
    )
    cosh_z = np.cosh(z_nodes)
    values = np.empty(len(u))
    for begin in range(0, len(u), _PSI_ROW_CHUNK):
        rows = u[begin : begin + _PSI_ROW_CHUNK]
        values[begin : begin + len(rows)] = np.exp(-rows[:, None] * cosh_z[None, :]) @ base
    return values


def _double_integral(
    t: float, outer_panels: int, z_splits: int, z_edges: list[float], tol_inner: float
) -> float:
    """int_0^inf y^-1/2 int_0^inf v^-1/2 exp(-v (1 + y^2) / 2) psi_yv(t) dv dy.

    Substitutes y = tan^2(beta) and v = w^2, which leaves a bounded integrand on
    beta in (0, pi/2) and a Gaussian in w, cut where it drops below ``tol_inner``.
    """
    beta, beta_weights = composite_rule([0.0, math.pi / 2.0], outer_panels)
    w_ref, w_ref_weights = composite_rule([0.0, 1.0], outer_panels)
    z_nodes, z_weights = composite_rule(z_edges, z_splits)

    y = np.tan(beta) ** 2
    psi_bound = 0.5 * math.sqrt(2.0 * math.pi * t) * math.exp(0.5 * t)
    log_ratio = max(math.log(psi_bound / tol_inner), 1.0)
    w_max = np.sqrt(2.0 * log_ratio / (1.0 + y * y))

    w = w_max[:, None] * w_ref[None, :]
    gauss = np.exp(-0.5 * w * w * (1.0 + y * y)[:, None])
    inner_weights = 2.0 * w_max[:, None] * w_ref_weights[None, :] * gauss
    psi_values = _psi_matrix((y[:, None] * w * w).ravel(), t, z_nodes, z_weights)
    inner = np.sum(inner_weights * psi_values.reshape(w.shape), axis=1)
    # y^-1/2 dy == 2 sec^2(beta) d(beta) and sec^2 == 1 + tan^2.
    return math.fsum(beta_weights * 2.0 * (1.0 + y) * inner)


def perimeter_exact(t: float, q: QuadratureSpec | None = None) -> ExactValue:
    """E L_t from the multiple-integral representation of E sqrt(xi_t).

    E L_t = 2 / (pi sqrt(t)) exp(pi^2 / 2t - t / 8) times the double integral over
    (y, v) of y^-1/2 v^-1/2 exp(-v (1 + y^2) / 2) psi_yv(t). The three-dimensional
    Gauss-Legendre grid is refined by doubling until two successive levels agree to
    ``abs_tol``. The settled level is then repeated with the w and z ranges cut
    ``TRUNCATION_TIGHTENING`` times further out, and the reported error is the larger
    of the level gap and the shift this causes.

    With the default ``max_panels`` of 4096 the refinement settles for horizons up to
    about t = 5; from t = 10 on it needs a larger panel budget.

    Raises:
        OutOfDomainError: If ``t < 0.5``.
        ToleranceNotMetError: If the next refinement would exceed ``max_panels``
            outer panels before two levels agree.
    """
    if not (math.isfinite(t) and t >= EXACT_MIN_HORIZON):
        raise OutOfDomainError(f"perimeter_exact supports t >= {EXACT_MIN_HORIZON}, got {t}")
    spec = q or PERIMETER_QUADRATURE
    prefactor = math.exp(
        math.log(2.0 / (math.pi * math.sqrt(t))) + math.pi**2 / (2.0 * t) - t / 8.0
    )
    tol_inner = spec.abs_tol / (100.0 * prefactor)

    def evaluate(level: int, cutoff: float) -> float:
        z_max = _psi_cutoff(0.0, t, cutoff / 10.0)
        z_edges = _lobe_edges(t, z_max if z_max is not None else t)
        outer = _BASE_OUTER_PANELS * 2**level
        return prefactor * _double_integral(t, outer, 2**level, z_edges, cutoff)

    previous: float | None = None
    level = 0
    while True:
        outer = _BASE_OUTER_PANELS * 2**level
        if outer * outer > spec.max_panels:
            raise ToleranceNotMetError(
                f"perimeter_exact({t}) did not settle within {spec.max_panels} panels"
            )
        value = evaluate(level, tol_inner)
        logger.debug("perimeter_exact_level", t=t, level=level, value=value)
        if previous is not None and abs(value - previous) < spec.abs_tol:
            level_gap = abs(value - previous)
            break
        previous = value
        level += 1

    tightened = evaluate(level, tol_inner / TRUNCATION_TIGHTENING)
    truncation_shift = abs(tightened - value)
    logger.debug(
        "perimeter_exact_settled",
        t=t,
        level=level,
        level_gap=level_gap,
        truncation_shift=truncation_shift,
    )
    return ExactValue(
        value=tightened,
        source="multiple-integral",
        est_abs_err=max(level_gap, truncation_shift),
    )


def exp_time_average_of_exact(
    lam: float = 1.0,
    abs_tol: float = 1e-3,
    nodes: int = 8,
) -> ExactValue:
    """Average of E L_t over an independent Exp(lam) horizon, from perimeter_exact.

    On [0, 1/2] E L_t is replaced by its small-time form sqrt(8 pi t); beyond 1/2 the
    exponential weight is integrated by Gauss-Laguerre, each node evaluated to a
    tolerance scaled by the inverse of its weight.
    """
    if not (math.isfinite(lam) and lam > 0):
        raise OutOfDomainError(f"lambda must be positive, got {lam}")
    head = (
        math.sqrt(8.0 * math.pi)
        * math.gamma(1.5)
        * special.gammainc(1.5, lam * EXACT_MIN_HORIZON)
        / math.sqrt(lam)
    )
    laguerre_nodes, laguerre_weights = np.polynomial.laguerre.laggauss(nodes)
    tail_mass = math.exp(-lam * EXACT_MIN_HORIZON)
    terms = []
    errors = []
    for node, weight in zip(laguerre_nodes.tolist(), laguerre_weights.tolist()):
        node_tol = min(abs_tol / (nodes * weight * tail_mass), 1.0)
        exact = perimeter_exact(
            EXACT_MIN_HORIZON + node / lam,
            QuadratureSpec(abs_tol=node_tol, max_panels=PERIMETER_QUADRATURE.max_panels),
        )
        terms.append(weight * exact.value)
        errors.append(weight * exact.est_abs_err)
    return ExactValue(
        value=head + tail_mass * math.fsum(terms),
        source="exp-time-average",
        est_abs_err=tail_mass * math.fsum(errors),
    )


__all__ = [
    "EXACT_MIN_HORIZON",
    "PERIMETER_QUADRATURE",
    "asymptotic_slope",
    "euclidean_exp_time_perimeter",
    "euclidean_perimeter",
    "exp_time_average_of_exact",
    "exp_time_perimeter",
    "g_function",
    "g_function_direct",
    "perimeter_exact",
    "psi",
    "xi_moment_limit",
]
