"""Report writer: streaming CSV/JSON output + sha256 hashing."""

from __future__ import annotations

import csv
import hashlib
import json
from collections.abc import Iterable
from pathlib import Path
from typing import IO, Any

from statkit.geometry.invariants import InvariantReport
from statkit.report.models import (
    COLUMNS,
    ErrorEntry,
    FixtureValidation,
    ReportArtifact,
    ReportFormat,
    RunSummary,
)


class IoFailure(Exception):
    """A report file could not be written."""


def _ensure_dir(path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)


def file_hash(path: Path) -> str:
    """Compute sha256 hex digest of a file's bytes."""
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def row_values(report: InvariantReport) -> dict[str, float | None]:
    """The report's values under the fixed column names."""
    data = report.model_dump(include=set(COLUMNS) - {"max_residual"})
    data["max_residual"] = report.max_residual
    return {key: data[key] for key in COLUMNS}


class SummaryReducer:
    """Running min slack / max residual over streamed rows."""

    def __init__(
        self,
        *,
        tolerance: float,
        slack_tolerance: float,
        oracle_tolerance: float | None = None,
    ) -> None:
        self.tolerance = tolerance
        self.slack_tolerance = slack_tolerance
        self.oracle_tolerance = oracle_tolerance
        self.min_slack: float | None = None
        self.max_residual = 0.0
        self.max_oracle = 0.0
        self.rows = 0

    def add(self, report: InvariantReport) -> None:
        self.rows += 1
        slack = report.slack
        if slack is not None:
            self.min_slack = slack if self.min_slack is None else min(self.min_slack, slack)
        self.max_residual = max(self.max_residual, report.max_residual)
        self.max_oracle = max(self.max_oracle, report.max_oracle_residual)

    def summary(self) -> RunSummary:
        violated = self.min_slack is not None and self.min_slack < -self.slack_tolerance
        failed = self.max_residual > self.tolerance or (
            self.oracle_tolerance is not None and self.max_oracle > self.oracle_tolerance
        )
        return RunSummary(
            min_slack=self.min_slack,
            max_residual=self.max_residual,
            passed=self.rows > 0 and not violated and not failed,
            slack_violated=violated,
            residual_failed=failed,
            rows=self.rows,
        )


def _csv_cell(value: float | None) -> str:
    return "" if value is None else repr(float(value))


def _write_csv(f: IO[str], reports: Iterable[InvariantReport], reducer: SummaryReducer) -> None:
    writer = csv.writer(f, lineterminator="\n")
    writer.writerow(COLUMNS)
    for report in reports:
        reducer.add(report)
        writer.writerow([_csv_cell(v) for v in row_values(report).values()])


def _write_json(f: IO[str], reports: Iterable[InvariantReport], reducer: SummaryReducer) -> None:
    f.write('{"points": [')
    for report in reports:
        if reducer.rows:
            f.write(",")
        reducer.add(report)
        f.write("\n  " + json.dumps(row_values(report)))
    f.write('\n], "summary": ')
    f.write(json.dumps(reducer.summary().model_dump(by_alias=True)))
    f.write("}\n")


def emit_report(
    reports: Iterable[InvariantReport],
    fmt: ReportFormat | str,
    path: Path,
    *,
    tolerance: float,
    slack_tolerance: float,
    oracle_tolerance: float | None = None,
) -> ReportArtifact:
    """Stream per-point rows to ``path`` and return the hashed artifact.

    Rows are written in iteration order; only the summary reduction is
    held in memory.
    """
    fmt = ReportFormat(fmt)
    reducer = SummaryReducer(
        tolerance=tolerance, slack_tolerance=slack_tolerance, oracle_tolerance=oracle_tolerance,
    )
    try:
        _ensure_dir(path)
        with open(path, "w", encoding="utf-8", newline="") as f:
            if fmt is ReportFormat.CSV:
                _write_csv(f, reports, reducer)
            else:
                _write_json(f, reports, reducer)
    except OSError as e:
        raise IoFailure(f"cannot write report {path}: {e}") from e
    if reducer.rows == 0:
        raise ValueError("emit_report needs at least one report")
    return ReportArtifact(
        path=str(path),
        format=fmt,
        sha256=file_hash(path),
        rows=reducer.rows,
        summary=reducer.summary(),
    )


def _write_document(
    path: Path, fmt: ReportFormat, payload: dict[str, Any], csv_rows: list[list[str]],
) -> str:
    try:
        _ensure_dir(path)
        with open(path, "w", encoding="utf-8", newline="") as f:
            if fmt is ReportFormat.CSV:
                csv.writer(f, lineterminator="\n").writerows(csv_rows)
            else:
                f.write(json.dumps(payload, indent=2) + "\n")
    except OSError as e:
        raise IoFailure(f"cannot write report {path}: {e}") from e
    return file_hash(path)


def emit_validation(
    validation: FixtureValidation, fmt: ReportFormat | str, path: Path,
) -> ReportArtifact:
    """Write a fixture residual report."""
    fmt = ReportFormat(fmt)
    summary = RunSummary(
        min_slack=None,
        max_residual=validation.max_residual,
        passed=validation.passed,
        residual_failed=not validation.passed,
        rows=1,
    )
    rows = [["check", "value", "tolerance", "pass"]]
    for name, value in validation.residuals().items():
        passed = value <= validation.tolerance
        rows.append([name, repr(value), repr(validation.tolerance), str(passed)])
    rows.append(["metric_spd", str(validation.metric_spd), "", str(validation.metric_spd)])
    payload = {
        "validation": validation.model_dump(),
        "summary": summary.model_dump(by_alias=True),
    }
    sha = _write_document(path, fmt, payload, rows)
    return ReportArtifact(path=str(path), format=fmt, sha256=sha, rows=1, summary=summary)


def emit_error(error: ErrorEntry, fmt: ReportFormat | str, path: Path) -> ReportArtifact:
    """Write a report that records a failure instead of rows."""
    fmt = ReportFormat(fmt)
    summary = RunSummary(passed=False)
    payload = {"error": error.model_dump(), "summary": summary.model_dump(by_alias=True)}
    rows = [["error", "message"], [error.kind, error.message]]
    sha = _write_document(path, fmt, payload, rows)
    return ReportArtifact(path=str(path), format=fmt, sha256=sha, rows=0, summary=summary)
