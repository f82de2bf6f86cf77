"""Statkit configuration, path constants and run settings."""

from __future__ import annotations

from pathlib import Path
from typing import Any, Literal

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from statkit.geometry.numerics import FdScheme

# Project root is wherever statkit is invoked
PROJECT_ROOT = Path.cwd()

# Report files land here unless --output is given
REPORTS_OUT = PROJECT_ROOT / "reports_out"

# Fixture catalogue
FIXTURES_DIR = Path(__file__).parent / "fixtures"
CATALOGUE_PATH = FIXTURES_DIR / "catalogue.yaml"

# Numerical defaults
DEFAULT_FD_STEP = 1e-4
DEFAULT_OUTER_STEP = 1e-3
DEFAULT_TOLERANCE = 1e-6  # strict residuals and fixture validation
DEFAULT_SLACK_TOLERANCE = 1e-5  # how negative a slack may be before it is a violation
DEFAULT_ORACLE_TOLERANCE = 1e-4  # FD oracle cross-checks
DEFAULT_GRID = 17
DEFAULT_SCAN_COUNT = 100

# Fixture validation sampling
LATTICE_PER_AXIS = 3
RANDOM_SAMPLES = 16

# Worker pool size cap
THREADS_ENV = "STATKIT_THREADS"

# Exit statuses
EXIT_OK = 0
EXIT_RESIDUAL = 1
EXIT_VIOLATION = 2
EXIT_VALIDATION = 3
EXIT_CONFIG = 64
EXIT_IO = 74


class ConfigError(Exception):
    """A run configuration cannot be parsed or is inconsistent."""


class RunConfig(BaseModel):
    """Everything one ``validate``/``verify``/``scan`` invocation needs."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    command: Literal["validate", "verify", "scan"]
    fixture: str
    surface: str | None = None
    radius: float | None = Field(None, gt=0)
    radius2: float | None = Field(None, gt=0)
    offset: float | None = None
    epsilon: float | None = Field(None, ge=0)
    potential: Literal["exp", "cubic"] | None = None
    coefficients: list[list[float]] | None = None
    grid: int = Field(DEFAULT_GRID, ge=2)
    fd_step: float = Field(DEFAULT_FD_STEP, gt=0)
    outer_step: float = Field(DEFAULT_OUTER_STEP, gt=0)
    tolerance: float = Field(DEFAULT_TOLERANCE, gt=0)
    slack_tolerance: float = Field(DEFAULT_SLACK_TOLERANCE, gt=0)
    oracle_tolerance: float = Field(DEFAULT_ORACLE_TOLERANCE, gt=0)
    seed: int = 0
    count: int = Field(DEFAULT_SCAN_COUNT, ge=1)
    oracles: bool = False
    output: Path | None = None
    format: Literal["json", "csv"] = "json"
    threads: int | None = Field(None, ge=1)

    @model_validator(mode="after")
    def _surface_for_verify(self) -> RunConfig:
        if self.command == "verify" and self.surface is None:
            raise ValueError("verify needs a surface")
        return self

    def scheme(self) -> FdScheme:
        return FdScheme(step=self.fd_step, outer_step=self.outer_step)

    def output_path(self) -> Path:
        if self.output is not None:
            return self.output
        return REPORTS_OUT / f"{self.command}_{self.fixture}.{self.format}"


def load_config_file(path: Path) -> dict[str, Any]:
    """Parse ``key=value`` lines; values are read as YAML scalars or flow lists.

    Blank lines and ``#`` comments are skipped. Dashes in keys map to
    underscores so file keys match CLI flag names.
    """
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e}") from e
    values: dict[str, Any] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        try:
            parsed = yaml.safe_load(value.strip())
        except yaml.YAMLError as e:
            raise ConfigError(f"{path}:{lineno}: cannot parse value {value!r}: {e}") from e
        values[key.strip().replace("-", "_")] = parsed
    return values


def build_config(
    file_values: dict[str, Any] | None, overrides: dict[str, Any],
) -> RunConfig:
    """Merge file values with flag overrides (``None`` flags do not override)."""
    merged = dict(file_values or {})
    merged.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return RunConfig(**merged)
    except ValidationError as e:
        raise ConfigError(str(e)) from e
