"""Tests for the statkit command line."""

from __future__ import annotations

import json
from pathlib import Path

import pytest
from typer.testing import CliRunner

from statkit import __version__
from statkit.cli import app

runner = CliRunner()


def _invoke(*args: str):
    return runner.invoke(app, list(args))


@pytest.fixture()
def out(tmp_path: Path) -> Path:
    return tmp_path / "report.json"


class TestInfo:
    def test_version(self):
        result = _invoke("--version")
        assert result.exit_code == 0
        assert __version__ in result.output

    def test_status(self):
        result = _invoke("status")
        assert result.exit_code == 0
        assert "catalogue" in result.output

    def test_fixtures(self):
        result = _invoke("fixtures")
        assert result.exit_code == 0
        assert "h4-hessian-analogue" in result.output
        assert "horosphere" in result.output


class TestValidate:
    def test_passing_fixture(self, out: Path):
        result = _invoke("validate", "--fixture", "h3-hessian", "--output", str(out))
        assert result.exit_code == 0, result.output
        data = json.loads(out.read_text())
        assert data["summary"]["pass"] is True
        assert data["validation"]["fixture"] == "h3-hessian"

    def test_unknown_fixture(self, out: Path):
        result = _invoke("validate", "--fixture", "moebius", "--output", str(out))
        assert result.exit_code == 64
        assert json.loads(out.read_text())["error"]["kind"] == "UnknownFixture"

    def test_non_spd_fixture(self, out: Path):
        result = _invoke(
            "validate", "--fixture", "hessian-potential-r4", "--potential", "cubic",
            "--epsilon", "5", "--output", str(out),
        )
        assert result.exit_code == 3
        assert json.loads(out.read_text())["validation"]["metric_spd"] is False


class TestVerify:
    def test_sphere_passes(self, out: Path):
        result = _invoke(
            "verify", "--fixture", "euclidean3-trivial", "--surface", "sphere",
            "--grid", "3", "--output", str(out),
        )
        assert result.exit_code == 0, result.output
        data = json.loads(out.read_text())
        assert len(data["points"]) == 9
        assert data["summary"]["min_slack"] > 0

    def test_saddle_is_a_violation(self, tmp_path: Path, out: Path):
        config = tmp_path / "saddle.conf"
        config.write_text(
            "fixture = euclidean3-trivial\n"
            "surface = graph\n"
            "coefficients = [[0, 0, 0, 0, 0.3, 0]]\n"
            "grid = 3\n"
        )
        result = _invoke("verify", "--config", str(config), "--output", str(out))
        assert result.exit_code == 2
        data = json.loads(out.read_text())
        origin = next(p for p in data["points"] if p["u1"] == 0.0 and p["u2"] == 0.0)
        assert origin["euler_slack"] == pytest.approx(-0.09, abs=1e-6)
        assert data["summary"]["pass"] is False

    def test_flags_override_config(self, tmp_path: Path, out: Path):
        config = tmp_path / "run.conf"
        config.write_text("fixture = euclidean4-trivial\nsurface = torus\ngrid = 9\n")
        result = _invoke("verify", "--config", str(config), "--grid", "2", "--output", str(out))
        assert result.exit_code == 0, result.output
        assert len(json.loads(out.read_text())["points"]) == 4

    def test_surface_outside_chart(self, out: Path):
        result = _invoke(
            "verify", "--fixture", "h3-hessian", "--surface", "horosphere",
            "--offset", "0.005", "--grid", "2", "--output", str(out),
        )
        assert result.exit_code == 3
        assert json.loads(out.read_text())["error"]["kind"] == "ValidationFailed"

    def test_horosphere_equality(self, out: Path):
        result = _invoke(
            "verify", "--fixture", "h3-hessian", "--surface", "horosphere",
            "--grid", "3", "--output", str(out),
        )
        assert result.exit_code == 0, result.output
        data = json.loads(out.read_text())
        assert data["summary"]["min_slack"] == pytest.approx(0.0, abs=1e-6)
        assert all(p["wintgen_slack"] is None for p in data["points"])

    def test_sphere_in_r4_equality(self, out: Path):
        result = _invoke(
            "verify", "--fixture", "euclidean4-trivial", "--surface", "sphere",
            "--radius", "1", "--grid", "3", "--output", str(out),
        )
        assert result.exit_code == 0, result.output
        min_slack = json.loads(out.read_text())["summary"]["min_slack"]
        assert min_slack == pytest.approx(0.0, abs=1e-5)

    def test_unreachable_tolerance(self, out: Path):
        result = _invoke(
            "verify", "--fixture", "h3-hessian", "--surface", "horosphere",
            "--grid", "2", "--tolerance", "1e-14", "--output", str(out),
        )
        assert result.exit_code == 3
        assert json.loads(out.read_text())["summary"]["pass"] is False

    def test_unknown_fixture(self, out: Path):
        result = _invoke(
            "verify", "--fixture", "unknown-name", "--surface", "plane", "--output", str(out),
        )
        assert result.exit_code == 64

    def test_oracle_gap_alone_is_a_residual_failure(self, out: Path):
        result = _invoke(
            "verify", "--fixture", "euclidean3-trivial", "--surface", "sphere", "--grid", "2",
            "--oracles", "--oracle-tolerance", "1e-13", "--output", str(out),
        )
        assert result.exit_code == 1
        data = json.loads(out.read_text())
        assert data["summary"]["min_slack"] > 0
        assert data["summary"]["pass"] is False

    def test_missing_surface(self, out: Path):
        result = _invoke("verify", "--fixture", "h3-hessian", "--output", str(out))
        assert result.exit_code == 64
        assert not out.exists()

    def test_csv_output(self, tmp_path: Path):
        path = tmp_path / "report.csv"
        result = _invoke(
            "verify", "--fixture", "euclidean4-trivial", "--surface", "plane",
            "--grid", "2", "--format", "csv", "--output", str(path),
        )
        assert result.exit_code == 0, result.output
        lines = path.read_text().splitlines()
        assert lines[0].startswith("u1,u2,G,G_perp")
        assert len(lines) == 5


class TestScan:
    def _scan(self, path: Path, *extra: str):
        return _invoke(
            "scan", "--fixture", "euclidean4-trivial", "--count", "4", "--seed", "5",
            "--output", str(path), *extra,
        )

    def test_deterministic(self, tmp_path: Path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert self._scan(a).exit_code == 0
        assert self._scan(b, "--threads", "3").exit_code == 0
        assert a.read_bytes() == b.read_bytes()

    def test_rows(self, out: Path):
        result = self._scan(out)
        assert result.exit_code == 0, result.output
        data = json.loads(out.read_text())
        assert len(data["points"]) == 4
        assert all(p["wintgen_slack"] >= -1e-5 for p in data["points"])
        assert "sha256" in result.output
