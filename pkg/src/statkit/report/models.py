"""Pydantic models for fixture validation results and run summaries."""

from __future__ import annotations

from enum import StrEnum

from pydantic import BaseModel, ConfigDict, Field, computed_field

# Report columns, in order, for both CSV and the per-point JSON objects
COLUMNS: tuple[str, ...] = (
    "u1",
    "u2",
    "G",
    "G_perp",
    "G0",
    "K0_ambient",
    "H_norm",
    "H_star_norm",
    "euler_slack",
    "wintgen_slack",
    "max_residual",
)


class ReportFormat(StrEnum):
    JSON = "json"
    CSV = "csv"


class FixtureValidation(BaseModel):
    """Worst residuals of a fixture's manifold checks over its sample points."""

    model_config = ConfigDict(frozen=True)

    fixture: str
    claimed_c: float
    points: int
    tolerance: float
    duality: float
    constant_curvature: float
    dual_constant_curvature: float
    curvature_duality: float
    metric_spd: bool

    def residuals(self) -> dict[str, float]:
        return {
            "duality": self.duality,
            "constant_curvature": self.constant_curvature,
            "dual_constant_curvature": self.dual_constant_curvature,
            "curvature_duality": self.curvature_duality,
        }

    @computed_field  # type: ignore[prop-decorator]
    @property
    def max_residual(self) -> float:
        return max(self.residuals().values())

    @computed_field  # type: ignore[prop-decorator]
    @property
    def passed(self) -> bool:
        return self.metric_spd and self.max_residual <= self.tolerance


class RunSummary(BaseModel):
    """Reduction over all report rows: worst slack, worst residual, verdict."""

    min_slack: float | None = None
    max_residual: float | None = None
    passed: bool = Field(False, serialization_alias="pass")
    slack_violated: bool = Field(False, exclude=True)
    residual_failed: bool = Field(False, exclude=True)
    rows: int = Field(0, exclude=True)


class ErrorEntry(BaseModel):
    """A failure recorded in place of report rows."""

    kind: str
    message: str


class ReportArtifact(BaseModel):
    """A written report file and its content hash."""

    path: str
    format: ReportFormat
    sha256: str
    rows: int
    summary: RunSummary
