"""Pydantic schemas for command-line settings, result rows and run manifests."""

from __future__ import annotations

from datetime import datetime
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, Field, field_validator

from hyphull.models import MCEstimate

Estimator = Literal[
    "direct",
    "rb",
    "xstar",
    "exp-time",
    "radius",
    "xi-moment",
    "ks",
    "angular",
    "identities",
]

DEFAULT_PATHS = 10_000


def _float_list(value: Any) -> Any:
    if isinstance(value, str):
        return [float(item) for item in value.split(",") if item.strip()]
    if isinstance(value, int | float):
        return [float(value)]
    return value


class EstimateSettings(BaseModel):
    """Resolved flat configuration of one ``estimate`` run."""

    estimator: Estimator
    t: list[float] = Field(default_factory=lambda: [1.0], description="Horizons")
    lam: list[float] = Field(default_factory=lambda: [1.0], description="Exp-time rates")
    p: float = Field(default=0.25, gt=0, description="Moment order for xi-moment")
    n: int = Field(default=DEFAULT_PATHS, ge=2, description="Number of paths")
    dt: float | None = Field(default=None, gt=0, description="Step size; horizon default")
    seed: int = Field(ge=0, lt=1 << 64, description="Root seed")
    threads: int = Field(default=1, ge=1, description="Worker processes")
    check: bool = False
    model: Literal["halfplane", "polar"] = "halfplane"
    s: float = Field(default=1e-3, gt=0, description="Entrance time of the winding")
    r_floor: float = Field(default=1e-6, gt=0)
    abs_tol: float = Field(default=1e-9, gt=0, description="Cauchy audit quadrature tolerance")
    max_panels: int = Field(default=4096, ge=1)
    output: Path | None = None

    @field_validator("t", "lam", mode="before")
    @classmethod
    def _split_lists(cls, value: Any) -> Any:
        return _float_list(value)

    @field_validator("check", mode="before")
    @classmethod
    def _parse_flag(cls, value: Any) -> Any:
        if isinstance(value, str):
            return value.strip().lower() in {"1", "true", "yes", "on"}
        return value

    def snapshot(self) -> dict[str, str]:
        """Flat string form stored in the manifest; floats use their exact repr."""
        flat: dict[str, str] = {}
        for key, value in self.model_dump(exclude={"output"}).items():
            if value is None:
                continue
            if isinstance(value, list):
                flat[key] = ",".join(repr(item) for item in value)
            else:
                flat[key] = repr(value) if isinstance(value, float) else str(value)
        return flat


class ResultRow(BaseModel):
    """One line of the results CSV."""

    label: str
    horizon: float
    n: int
    dt: float
    seed: int
    mean: float
    stderr: float
    target: float | None = None
    target_source: str | None = None
    details: dict[str, float] = Field(
        default_factory=dict, description="Estimator extras, such as the exp-time truncation mass"
    )

    @classmethod
    def from_estimate(cls, estimate: MCEstimate) -> ResultRow:
        return cls(
            label=estimate.label,
            horizon=estimate.horizon,
            n=estimate.n,
            dt=estimate.dt,
            seed=estimate.seed,
            mean=estimate.mean,
            stderr=estimate.stderr,
            target=estimate.target,
            target_source=estimate.target_source,
            details=dict(estimate.details),
        )


class CheckOutcome(BaseModel):
    """Result of one acceptance check."""

    name: str
    passed: bool
    detail: str = ""


class RunManifest(BaseModel):
    """Everything needed to replay a run and compare its numbers."""

    command_line: list[str]
    config: dict[str, str]
    seed: int
    version: str
    started_at: datetime
    wall_clock_seconds: float = Field(ge=0)
    results: list[ResultRow] = Field(default_factory=list)
    checks: list[CheckOutcome] = Field(default_factory=list)


__all__ = ["CheckOutcome", "EstimateSettings", "Estimator", "ResultRow", "RunManifest"]
