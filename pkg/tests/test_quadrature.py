"""Tests for adaptive Gauss-Legendre quadrature."""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from hyphull.exceptions import ToleranceNotMetError
from hyphull.models import QuadratureSpec
from hyphull.quadrature import (
    QuadratureResult,
    composite_rule,
    gauss_legendre_panel,
    integrate_adaptive,
)


def test_single_panel_is_exact_for_polynomials() -> None:
    """Test one panel integrates a degree-31 polynomial exactly."""
    value = gauss_legendre_panel(lambda x: 32 * x**31, 0.0, 1.0)
    assert value == pytest.approx(1.0, rel=1e-13)


def test_composite_rule_weights_sum_to_length() -> None:
    """Test composite weights add up to the interval length."""
    nodes, weights = composite_rule([0.0, 1.0, 3.0], 4)
    assert len(nodes) == len(weights) == 2 * 4 * 16
    assert math.fsum(weights) == pytest.approx(3.0)
    assert np.all((nodes > 0) & (nodes < 3))


def test_adaptive_smooth_integrand(quadrature) -> None:
    """Test a smooth integral."""
    result = integrate_adaptive(np.sin, [0.0, math.pi], quadrature)
    assert result.value == pytest.approx(2.0, abs=1e-12)
    assert result.abs_err <= quadrature.abs_tol


def test_adaptive_kink_at_breakpoint(quadrature) -> None:
    """Test kinks placed on breakpoints integrate without refinement trouble."""
    result = integrate_adaptive(lambda x: np.abs(x - 0.3), [0.0, 0.3, 1.0], quadrature)
    assert result.value == pytest.approx(0.29, abs=1e-12)
    assert result.panels == 2


def test_adaptive_kink_inside_panel() -> None:
    """Test bisection converges on a kink away from the breakpoints."""
    spec = QuadratureSpec(abs_tol=1e-8, max_panels=4096)
    result = integrate_adaptive(lambda x: np.abs(x - 1.0 / 3.0), [0.0, 1.0], spec)
    assert result.value == pytest.approx(5.0 / 18.0, abs=1e-8)
    assert result.panels > 1


def test_adaptive_budget_exhausted() -> None:
    """Test a panel budget too small for the tolerance raises."""
    spec = QuadratureSpec(abs_tol=1e-14, max_panels=2)
    with pytest.raises(ToleranceNotMetError):
        integrate_adaptive(lambda x: np.abs(x - 1.0 / 3.0), [0.0, 1.0], spec)


def test_too_many_initial_panels() -> None:
    """Test more breakpoint intervals than the budget raises."""
    with pytest.raises(ToleranceNotMetError):
        integrate_adaptive(np.sin, [0.0, 1.0, 2.0, 3.0], QuadratureSpec(max_panels=2))


def test_result_is_validated_and_frozen(quadrature) -> None:
    """Test results reject negative errors and cannot be modified."""
    with pytest.raises(ValidationError):
        QuadratureResult(value=1.0, abs_err=-1e-3, panels=1)
    result = integrate_adaptive(np.cos, [0.0, 1.0], quadrature)
    with pytest.raises(ValidationError):
        result.value = 0.0
    assert result.model_dump()["panels"] == result.panels
