"""Tests for report writing, summaries and hashing."""

import csv
import hashlib
import json
from pathlib import Path

import pytest

from statkit.geometry.invariants import InvariantReport
from statkit.report.models import COLUMNS, ErrorEntry, FixtureValidation, ReportFormat
from statkit.report.writer import (
    IoFailure,
    SummaryReducer,
    emit_error,
    emit_report,
    emit_validation,
    file_hash,
    row_values,
)


def _report(u1: float, slack: float, residual: float = 1e-9) -> InvariantReport:
    return InvariantReport(
        u1=u1, u2=0.0, G=0.1, G_perp=0.0, G0=0.2, K0_ambient=0.0,
        H_norm=0.5, H_star_norm=0.5, wintgen_slack=slack,
        residuals={"duality": residual},
    )


def _euler(u1: float, slack: float) -> InvariantReport:
    return InvariantReport(
        u1=u1, u2=0.0, G=0.1, G0=0.2, K0_ambient=0.0,
        H_norm=0.5, H_star_norm=0.5, euler_slack=slack,
    )


def _emit(reports, fmt, path, **kwargs):
    kwargs.setdefault("tolerance", 1e-6)
    kwargs.setdefault("slack_tolerance", 1e-5)
    return emit_report(reports, fmt, path, **kwargs)


class TestRows:
    def test_columns_in_order(self):
        assert list(row_values(_report(0.0, 1.0))) == list(COLUMNS)

    def test_max_residual_column(self):
        report = _report(0.0, 1.0, residual=3e-7)
        assert row_values(report)["max_residual"] == 3e-7

    def test_missing_dimension_fields_are_none(self):
        row = row_values(_euler(0.0, 0.5))
        assert row["G_perp"] is None
        assert row["wintgen_slack"] is None
        assert row["euler_slack"] == 0.5


class TestSummaryReducer:
    def test_passing(self):
        reducer = SummaryReducer(tolerance=1e-6, slack_tolerance=1e-5)
        for r in (_report(0.0, 0.3), _report(0.1, 0.2)):
            reducer.add(r)
        summary = reducer.summary()
        assert summary.min_slack == 0.2
        assert summary.passed

    def test_small_negative_slack_tolerated(self):
        reducer = SummaryReducer(tolerance=1e-6, slack_tolerance=1e-5)
        reducer.add(_report(0.0, -1e-6))
        assert reducer.summary().passed

    def test_violation(self):
        reducer = SummaryReducer(tolerance=1e-6, slack_tolerance=1e-5)
        reducer.add(_report(0.0, -0.09))
        summary = reducer.summary()
        assert summary.slack_violated
        assert not summary.passed

    def test_residual_failure(self):
        reducer = SummaryReducer(tolerance=1e-6, slack_tolerance=1e-5)
        reducer.add(_report(0.0, 0.5, residual=1e-3))
        summary = reducer.summary()
        assert summary.residual_failed
        assert not summary.slack_violated
        assert not summary.passed

    def test_oracle_tolerance(self):
        report = InvariantReport(
            u1=0.0, u2=0.0, G=0.0, G0=0.0, K0_ambient=0.0, H_norm=0.0, H_star_norm=0.0,
            euler_slack=0.0, oracle_residuals={"codazzi": 1e-3},
        )
        lenient = SummaryReducer(tolerance=1e-6, slack_tolerance=1e-5)
        strict = SummaryReducer(tolerance=1e-6, slack_tolerance=1e-5, oracle_tolerance=1e-4)
        lenient.add(report)
        strict.add(report)
        assert lenient.summary().passed
        assert not strict.summary().passed

    def test_empty_is_not_a_pass(self):
        assert not SummaryReducer(tolerance=1e-6, slack_tolerance=1e-5).summary().passed


class TestEmitReport:
    def test_json(self, tmp_path: Path):
        path = tmp_path / "out" / "run.json"
        artifact = _emit([_report(0.0, 0.3), _report(0.5, 0.1)], "json", path)
        data = json.loads(path.read_text())
        assert [p["u1"] for p in data["points"]] == [0.0, 0.5]
        assert list(data["points"][0]) == list(COLUMNS)
        assert data["summary"] == {"min_slack": 0.1, "max_residual": 1e-9, "pass": True}
        assert artifact.rows == 2
        assert artifact.format is ReportFormat.JSON

    def test_csv(self, tmp_path: Path):
        path = tmp_path / "run.csv"
        _emit([_euler(0.25, -0.09)], "csv", path)
        with open(path, newline="") as f:
            rows = list(csv.reader(f))
        assert rows[0] == list(COLUMNS)
        row = dict(zip(rows[0], rows[1], strict=True))
        assert float(row["u1"]) == 0.25
        assert float(row["euler_slack"]) == -0.09
        assert row["wintgen_slack"] == ""

    def test_floats_round_trip_exactly(self, tmp_path: Path):
        value = 0.1 + 0.2
        path = tmp_path / "run.csv"
        _emit([_euler(value, 1.0)], "csv", path)
        with open(path, newline="") as f:
            rows = list(csv.reader(f))
        assert float(rows[1][0]) == value

    def test_hash_matches_bytes(self, tmp_path: Path):
        path = tmp_path / "run.json"
        artifact = _emit([_report(0.0, 0.3)], "json", path)
        assert artifact.sha256 == hashlib.sha256(path.read_bytes()).hexdigest()
        assert file_hash(path) == artifact.sha256

    def test_identical_input_identical_bytes(self, tmp_path: Path):
        reports = [_report(0.1 * i, 0.3 - 0.01 * i) for i in range(5)]
        a = _emit(reports, "json", tmp_path / "a.json")
        b = _emit(reports, "json", tmp_path / "b.json")
        assert a.sha256 == b.sha256

    def test_streams_a_generator(self, tmp_path: Path):
        artifact = _emit((_report(float(i), 1.0) for i in range(3)), "csv", tmp_path / "g.csv")
        assert artifact.rows == 3

    def test_no_rows(self, tmp_path: Path):
        with pytest.raises(ValueError):
            _emit([], "json", tmp_path / "empty.json")

    def test_unwritable_path(self, tmp_path: Path):
        blocker = tmp_path / "file"
        blocker.write_text("x")
        with pytest.raises(IoFailure):
            _emit([_report(0.0, 0.3)], "json", blocker / "run.json")


class TestEmitOther:
    def test_validation(self, tmp_path: Path):
        validation = FixtureValidation(
            fixture="h3-hessian", claimed_c=0.0, points=43, tolerance=1e-6,
            duality=1e-10, constant_curvature=2e-7, dual_constant_curvature=3e-7,
            curvature_duality=5e-8, metric_spd=True,
        )
        path = tmp_path / "validate.json"
        artifact = emit_validation(validation, "json", path)
        data = json.loads(path.read_text())
        assert data["validation"]["max_residual"] == 3e-7
        assert data["summary"]["pass"] is True
        assert artifact.summary.passed

    def test_validation_csv(self, tmp_path: Path):
        validation = FixtureValidation(
            fixture="x", claimed_c=0.0, points=1, tolerance=1e-6, duality=1e-3,
            constant_curvature=0.0, dual_constant_curvature=0.0, curvature_duality=0.0,
            metric_spd=True,
        )
        path = tmp_path / "validate.csv"
        artifact = emit_validation(validation, "csv", path)
        rows = list(csv.reader(path.open(newline="")))
        assert rows[0] == ["check", "value", "tolerance", "pass"]
        assert rows[1][0] == "duality"
        assert rows[1][3] == "False"
        assert not artifact.summary.passed

    def test_error(self, tmp_path: Path):
        path = tmp_path / "error.json"
        emit_error(ErrorEntry(kind="UnknownFixture", message="no such fixture"), "json", path)
        data = json.loads(path.read_text())
        assert data["error"]["kind"] == "UnknownFixture"
        assert data["summary"]["pass"] is False
