"""Gauss-Legendre panel quadrature shared by the Cauchy formula and the exact formulas."""

from __future__ import annotations

import heapq
import math
from collections.abc import Callable, Sequence
import numpy as np
import structlog
from pydantic import BaseModel, ConfigDict, Field

from hyphull.exceptions import ToleranceNotMetError
from hyphull.models import QuadratureSpec

logger = structlog.get_logger(__name__)

PANEL_NODES = 16
_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(PANEL_NODES)

Integrand = Callable[[np.ndarray], np.ndarray]


class QuadratureResult(BaseModel):
    """Integral value, error estimate and number of panels used."""

    model_config = ConfigDict(frozen=True)

    value: float
    abs_err: float = Field(ge=0)
    panels: int = Field(ge=0)


def gauss_legendre_panel(f: Integrand, a: float, b: float) -> float:
    """16-node Gauss-Legendre rule on [a, b] for a vectorized integrand."""
    half = 0.5 * (b - a)
    return half * math.fsum(_WEIGHTS * f(0.5 * (a + b) + half * _NODES))


def composite_rule(breakpoints: Sequence[float], splits: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of a composite rule with ``splits`` equal panels per interval."""
    edges = np.concatenate(
        [np.linspace(a, b, splits + 1)[:-1] for a, b in zip(breakpoints[:-1], breakpoints[1:])]
        + [np.asarray(breakpoints[-1:], dtype=float)]
    )
    left, right = edges[:-1], edges[1:]
    half = 0.5 * (right - left)
    nodes = (0.5 * (left + right))[:, None] + half[:, None] * _NODES[None, :]
    weights = half[:, None] * _WEIGHTS[None, :]
    return nodes.ravel(), weights.ravel()


def integrate_adaptive(
    f: Integrand,
    breakpoints: Sequence[float],
    spec: QuadratureSpec,
) -> QuadratureResult:
    """Integrate f over [breakpoints[0], breakpoints[-1]] with adaptive bisection of panels.

    Each panel is scored by the gap between its one-panel and two-half-panel rules; the
    worst panel is split until the summed gap is below ``spec.abs_tol``. The final sum is
    taken in left-to-right panel order so the result does not depend on split history.

    Raises:
        ToleranceNotMetError: If ``spec.max_panels`` panels are in use and the summed
            error estimate still exceeds ``spec.abs_tol``.
    """
    if len(breakpoints) < 2:
        raise ValueError("need at least two breakpoints")
    if len(breakpoints) - 1 > spec.max_panels:
        raise ToleranceNotMetError(
            f"{len(breakpoints) - 1} initial panels exceed max_panels={spec.max_panels}"
        )

    def score(a: float, b: float) -> tuple[float, float, float, float]:
        middle = 0.5 * (a + b)
        refined = gauss_legendre_panel(f, a, middle) + gauss_legendre_panel(f, middle, b)
        return -abs(refined - gauss_legendre_panel(f, a, b)), a, b, refined

    heap = [score(a, b) for a, b in zip(breakpoints[:-1], breakpoints[1:]) if b > a]
    heapq.heapify(heap)
    while True:
        total_err = math.fsum(-entry[0] for entry in heap)
        if total_err <= spec.abs_tol:
            break
        if len(heap) >= spec.max_panels:
            logger.warning(
                "quadrature_budget_exhausted",
                panels=len(heap),
                abs_err=total_err,
                abs_tol=spec.abs_tol,
            )
            raise ToleranceNotMetError(
                f"error estimate {total_err:.3e} above {spec.abs_tol:.3e} "
                f"after {len(heap)} panels"
            )
        _, a, b, _ = heapq.heappop(heap)
        middle = 0.5 * (a + b)
        heapq.heappush(heap, score(a, middle))
        heapq.heappush(heap, score(middle, b))

    ordered = sorted(heap, key=lambda entry: entry[1])
    return QuadratureResult(
        value=math.fsum(entry[3] for entry in ordered),
        abs_err=total_err,
        panels=len(heap),
    )
