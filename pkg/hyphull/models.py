"""Data models for hyperbolic points, paths, hulls and estimates."""

from __future__ import annotations

import math
from typing import Any, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from hyphull.exceptions import InvalidConfigError, OutOfDomainError

TWO_PI = 2.0 * math.pi
# Points with |z|^2 >= 1 - DISK_TOLERANCE count as boundary points.
DISK_TOLERANCE = 1e-14
UINT64_MAX = (1 << 64) - 1


def _frozen_array(value: Any, *, ndim: int, name: str) -> np.ndarray:
    array = np.array(value, dtype=float)
    if ndim == 2 and array.size == 0:
        array = array.reshape(0, 2)
    if array.ndim != ndim or (ndim == 2 and array.shape[1] != 2):
        raise ValueError(f"{name} must be a {ndim}-dimensional array")
    if not np.all(np.isfinite(array)):
        raise ValueError(f"{name} must be finite")
    array.setflags(write=False)
    return array


def check_inside_disk(points: np.ndarray) -> None:
    """Raise OutOfDomainError unless every row of an (n, 2) array is inside the unit disk."""
    if points.size == 0:
        return
    squared = np.einsum("ij,ij->i", points, points)
    if float(np.max(squared)) >= 1.0 - DISK_TOLERANCE:
        raise OutOfDomainError("point lies on or outside the unit disk")


class GeodesicPolar(BaseModel):
    """Geodesic polar coordinates (R, theta) of a point of the hyperbolic plane."""

    model_config = ConfigDict(frozen=True)

    r: float = Field(ge=0, description="Hyperbolic distance from the origin")
    theta: float = Field(default=0.0, description="Angle in [0, 2*pi)")

    @model_validator(mode="before")
    @classmethod
    def _normalize_angle(cls, data: Any) -> Any:
        if not isinstance(data, dict) or "theta" not in data:
            return data
        theta = float(data["theta"]) % TWO_PI
        if theta >= TWO_PI or float(data.get("r", 0.0)) == 0.0:
            theta = 0.0
        return {**data, "theta": theta}


class HalfPlanePoint(BaseModel):
    """Cartesian point (x, y) of the Poincare upper half-plane."""

    model_config = ConfigDict(frozen=True)

    x: float = Field(description="Horizontal coordinate")
    y: float = Field(description="Vertical coordinate, strictly positive")

    @field_validator("y")
    @classmethod
    def _check_positive(cls, value: float) -> float:
        if not value > 0.0:
            raise OutOfDomainError(f"half-plane point needs y > 0, got {value}")
        return value


class _DiskPoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    u: float = Field(description="First Cartesian coordinate")
    v: float = Field(description="Second Cartesian coordinate")

    @model_validator(mode="after")
    def _check_inside(self) -> _DiskPoint:
        if self.u * self.u + self.v * self.v >= 1.0 - DISK_TOLERANCE:
            raise OutOfDomainError(f"({self.u}, {self.v}) is not inside the unit disk")
        return self

    @property
    def radius(self) -> float:
        return math.hypot(self.u, self.v)

    @property
    def angle(self) -> float:
        return math.atan2(self.v, self.u) % TWO_PI

    def as_array(self) -> np.ndarray:
        return np.array([self.u, self.v])


class PoincarePoint(_DiskPoint):
    """Point of the Poincare disk."""


class KleinPoint(_DiskPoint):
    """Point of the Beltrami-Klein disk, where geodesics are straight chords."""


class PlanarPath(BaseModel):
    """A trajectory sampled on a time grid, in Klein coordinates."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    points: np.ndarray = Field(description="(n, 2) array of Klein coordinates")
    times: np.ndarray = Field(description="(n,) strictly increasing sample times")

    @field_validator("points", mode="before")
    @classmethod
    def _coerce_points(cls, value: Any) -> np.ndarray:
        if isinstance(value, list) and value and isinstance(value[0], KleinPoint):
            value = [point.as_array() for point in value]
        return _frozen_array(value, ndim=2, name="points")

    @field_validator("times", mode="before")
    @classmethod
    def _coerce_times(cls, value: Any) -> np.ndarray:
        return _frozen_array(value, ndim=1, name="times")

    @model_validator(mode="after")
    def _check_grid(self) -> PlanarPath:
        if len(self.points) != len(self.times):
            raise ValueError("points and times must have equal lengths")
        if len(self.times) and (self.times[0] < 0 or np.any(np.diff(self.times) <= 0)):
            raise ValueError("times must be nonnegative and strictly increasing")
        check_inside_disk(self.points)
        return self

    def __len__(self) -> int:
        return len(self.times)


class ConvexPolygon(BaseModel):
    """Counterclockwise vertex list of a convex polygon in the Klein disk.

    One vertex is a point, two vertices a segment; the closing edge runs last to first.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    vertices: np.ndarray = Field(description="(h, 2) array of Klein coordinates")

    @field_validator("vertices", mode="before")
    @classmethod
    def _coerce_vertices(cls, value: Any) -> np.ndarray:
        if isinstance(value, list) and value and isinstance(value[0], KleinPoint):
            value = [point.as_array() for point in value]
        return _frozen_array(value, ndim=2, name="vertices")

    @model_validator(mode="after")
    def _check_convex(self) -> ConvexPolygon:
        if len(self.vertices) == 0:
            raise ValueError("a polygon needs at least one vertex")
        check_inside_disk(self.vertices)
        if len(self.vertices) >= 3:
            edges = np.roll(self.vertices, -1, axis=0) - self.vertices
            turns = edges[:, 0] * np.roll(edges, -1, axis=0)[:, 1] - edges[:, 1] * np.roll(
                edges, -1, axis=0
            )[:, 0]
            if np.any(turns < -1e-12):
                raise ValueError("vertices are not in convex counterclockwise order")
        return self

    @property
    def points(self) -> list[KleinPoint]:
        return [KleinPoint(u=float(u), v=float(v)) for u, v in self.vertices]

    def __len__(self) -> int:
        return len(self.vertices)


class QuadratureSpec(BaseModel):
    """Accuracy target and panel budget for adaptive quadrature."""

    model_config = ConfigDict(frozen=True)

    abs_tol: float = Field(default=1e-9, gt=0, description="Absolute error target")
    max_panels: int = Field(default=4096, ge=1, description="Maximum number of panels")


class SimConfig(BaseModel):
    """Time horizon, step size and random-stream identity of one simulated path."""

    model_config = ConfigDict(frozen=True)

    t_end: float = Field(description="Time horizon")
    dt: float = Field(description="Nominal step size")
    seed: int = Field(default=0, description="Root seed")
    path_index: int = Field(default=0, description="Index of the path under the root seed")
    noise: bool = Field(default=True, description="Disable to run the zero-noise debug mode")

    @model_validator(mode="after")
    def _check_consistent(self) -> SimConfig:
        if not (math.isfinite(self.t_end) and self.t_end > 0):
            raise InvalidConfigError(f"t_end must be positive, got {self.t_end}")
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise InvalidConfigError(f"dt must be positive, got {self.dt}")
        if self.dt > self.t_end:
            raise InvalidConfigError(f"dt={self.dt} exceeds t_end={self.t_end}")
        for name in ("seed", "path_index"):
            value = getattr(self, name)
            if not 0 <= value <= UINT64_MAX:
                raise InvalidConfigError(f"{name} must fit in 64 unsigned bits, got {value}")
        return self

    @property
    def n_steps(self) -> int:
        return max(1, math.ceil(self.t_end / self.dt - 1e-9))

    def for_path(self, path_index: int, t_end: float | None = None) -> SimConfig:
        """Return this template retargeted at another path and, optionally, horizon."""
        horizon = self.t_end if t_end is None else t_end
        return SimConfig(
            t_end=horizon,
            dt=min(self.dt, horizon),
            seed=self.seed,
            path_index=path_index,
            noise=self.noise,
        )


class HalfPlanePath(BaseModel):
    """Half-plane trajectory (X, Y) with its driving noise W^Y and running functional xi."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    times: np.ndarray
    x: np.ndarray
    y: np.ndarray
    wy: np.ndarray
    xi: np.ndarray

    @field_validator("times", "x", "y", "wy", "xi", mode="before")
    @classmethod
    def _coerce(cls, value: Any) -> np.ndarray:
        return _frozen_array(value, ndim=1, name="path column")

    @model_validator(mode="after")
    def _check_columns(self) -> HalfPlanePath:
        size = len(self.times)
        if any(len(column) != size for column in (self.x, self.y, self.wy, self.xi)):
            raise ValueError("path columns must have equal lengths")
        if np.any(self.y <= 0):
            raise OutOfDomainError("half-plane path left the upper half-plane")
        return self


class PolarPath(BaseModel):
    """Radial process R and post-entrance winding process on a time grid."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    times: np.ndarray
    r: np.ndarray
    theta_winding: np.ndarray
    w_radial: np.ndarray = Field(description="Driving Brownian motion of R at gridpoints")
    theta_entrance: float = Field(ge=0, lt=TWO_PI, description="Uniform angle at entrance")
    entrance_index: int = Field(ge=0, description="Grid index of the entrance time s")
    reflection_slack: float = Field(ge=0, description="Total upward push from reflection")

    @field_validator("times", "r", "theta_winding", "w_radial", mode="before")
    @classmethod
    def _coerce(cls, value: Any) -> np.ndarray:
        return _frozen_array(value, ndim=1, name="path column")

    @model_validator(mode="after")
    def _check_columns(self) -> PolarPath:
        size = len(self.times)
        if any(len(column) != size for column in (self.r, self.theta_winding, self.w_radial)):
            raise ValueError("path columns must have equal lengths")
        if np.any(self.r < 0):
            raise ValueError("radial process must be nonnegative")
        if self.entrance_index >= size:
            raise ValueError("entrance index outside the grid")
        return self

    @property
    def angles(self) -> np.ndarray:
        """Geodesic polar angle theta_t, frozen at the entrance angle before time s."""
        angles = np.full(len(self.times), self.theta_entrance)
        angles[self.entrance_index :] += self.theta_winding[self.entrance_index :]
        return np.mod(angles, TWO_PI)


class XiSample(BaseModel):
    """One draw of the exponential functional at horizon t."""

    model_config = ConfigDict(frozen=True)

    t: float = Field(gt=0)
    xi_t: float = Field(gt=0)


class MCEstimate(BaseModel):
    """Monte Carlo mean with its standard error and provenance."""

    model_config = ConfigDict(frozen=True)

    label: str = Field(description="Estimator identifier")
    horizon: float = Field(description="Time horizon (mean horizon for exponential times)")
    n: int = Field(ge=2, description="Number of sample paths")
    mean: float
    stderr: float = Field(ge=0, description="Sample standard deviation over sqrt(n)")
    seed: int
    dt: float
    target: float | None = None
    target_source: str | None = None
    details: dict[str, float] = Field(default_factory=dict)

    def scaled(self, factor: float, label: str) -> MCEstimate:
        """Return the estimate of factor times the same quantity."""
        return self.model_copy(
            update={
                "label": label,
                "mean": factor * self.mean,
                "stderr": abs(factor) * self.stderr,
            }
        )


class KSResult(BaseModel):
    """Kolmogorov-Smirnov statistic of a sample against a reference law."""

    model_config = ConfigDict(frozen=True)

    statistic: float = Field(ge=0, le=1)
    p_value: float = Field(ge=0, le=1)
    n: int = Field(ge=1)
    reference: str


class ConsistencyCheck(BaseModel):
    """Comparison of two estimates of the same expectation."""

    model_config = ConfigDict(frozen=True)

    left: str
    right: str
    horizon: float
    difference: float
    joint_stderr: float = Field(ge=0)
    tolerance_sigmas: float = Field(gt=0)

    @property
    def passed(self) -> bool:
        return abs(self.difference) <= self.tolerance_sigmas * self.joint_stderr


class AngularRateResult(BaseModel):
    """Per-path slopes of log|Theta_tmax - Theta_t| against t, and limiting-angle proxies."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    slopes: np.ndarray
    theta_limits: np.ndarray
    uniform_ks: KSResult

    @property
    def median_slope(self) -> float:
        return float(np.nanmedian(self.slopes))


class ExactValue(BaseModel):
    """Closed-form or quadrature value tagged with the formula that produced it.

    ``scaling`` records how the quantity behaves in the horizon t: ``constant`` values are
    limits, ``linear`` values are slopes, ``exponential`` values are prefactors of
    ``exp(growth_rate * t)``.
    """

    model_config = ConfigDict(frozen=True)

    value: float
    source: str
    est_abs_err: float = Field(default=0.0, ge=0)
    scaling: Literal["constant", "linear", "exponential"] = "constant"
    growth_rate: float = 0.0

    def at(self, t: float) -> float:
        """Asymptotic target at horizon t."""
        if self.scaling == "linear":
            return self.value * t
        if self.scaling == "exponential":
            return self.value * math.exp(self.growth_rate * t)
        return self.value
