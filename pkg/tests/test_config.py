"""Tests for run configuration and the worker pool."""

import os
import time
from pathlib import Path

import pytest

from statkit.config import REPORTS_OUT, ConfigError, RunConfig, build_config, load_config_file
from statkit.suite.pool import DISPATCH_FACTOR, chunked, ordered_map, worker_count


class TestConfigFile:
    def test_parses_scalars_and_lists(self, tmp_path: Path):
        path = tmp_path / "run.conf"
        path.write_text(
            "# comment\n"
            "fixture = h3-hessian\n"
            "\n"
            "fd-step=2.5e-5\n"
            "grid = 5\n"
            "oracles = true\n"
            "coefficients = [[0, 0, 0, 0.1, 0, 0.1]]\n"
        )
        values = load_config_file(path)
        assert values == {
            "fixture": "h3-hessian",
            "fd_step": 2.5e-5,
            "grid": 5,
            "oracles": True,
            "coefficients": [[0, 0, 0, 0.1, 0, 0.1]],
        }

    def test_bad_line(self, tmp_path: Path):
        path = tmp_path / "run.conf"
        path.write_text("fixture h3-hessian\n")
        with pytest.raises(ConfigError, match=":1:"):
            load_config_file(path)

    def test_missing_file(self, tmp_path: Path):
        with pytest.raises(ConfigError):
            load_config_file(tmp_path / "absent.conf")


class TestBuildConfig:
    def test_flags_override_file(self):
        config = build_config(
            {"fixture": "h3-hessian", "grid": 5, "seed": 1},
            {"command": "validate", "grid": 9, "seed": None},
        )
        assert config.grid == 9
        assert config.seed == 1

    def test_exponent_without_dot(self):
        # YAML reads 1e-5 as a string; the model coerces it
        config = build_config(
            {"fd_step": "1e-5"}, {"command": "validate", "fixture": "h3-hessian"},
        )
        assert config.fd_step == 1e-5

    def test_defaults(self):
        config = build_config(None, {"command": "scan", "fixture": "euclidean4-trivial"})
        assert config.count == 100
        assert config.format == "json"
        assert config.output_path() == REPORTS_OUT / "scan_euclidean4-trivial.json"

    def test_scheme(self):
        config = RunConfig(command="validate", fixture="h3-hessian", fd_step=1e-5, outer_step=2e-3)
        scheme = config.scheme()
        assert scheme.step == 1e-5
        assert scheme.outer_step == 2e-3

    def test_verify_needs_surface(self):
        with pytest.raises(ConfigError, match="surface"):
            build_config(None, {"command": "verify", "fixture": "h3-hessian"})

    @pytest.mark.parametrize(
        "bad",
        [{"grid": 1}, {"fd_step": 0.0}, {"format": "xml"}, {"unknown_key": 3}, {"threads": 0}],
    )
    def test_rejects(self, bad):
        with pytest.raises(ConfigError):
            build_config(None, {"command": "validate", "fixture": "h3-hessian", **bad})


class TestPool:
    def test_requested(self):
        assert worker_count(3, env={}) == 3

    def test_env_caps(self):
        assert worker_count(6, env={"STATKIT_THREADS": "2"}) == 2
        assert worker_count(1, env={"STATKIT_THREADS": "8"}) == 1

    def test_bad_env_ignored(self):
        assert worker_count(4, env={"STATKIT_THREADS": "many"}) == 4

    def test_at_least_one(self):
        assert worker_count(None, env={"STATKIT_THREADS": "0"}) == 1

    def test_order_preserved(self):
        def slow_square(x: int) -> int:
            time.sleep(0.01 * (5 - x))
            return x * x

        assert list(ordered_map(slow_square, range(5), 4)) == [0, 1, 4, 9, 16]

    def test_runs_in_worker_processes(self):
        def pid(_: int) -> int:
            time.sleep(0.01)
            return os.getpid()

        pids = set(ordered_map(pid, range(8), 2))
        assert os.getpid() not in pids

    def test_single_worker_is_serial(self):
        assert set(ordered_map(lambda _: os.getpid(), range(4), 1)) == {os.getpid()}

    def test_input_pulled_in_bounded_windows(self):
        pulled = 0

        def items():
            nonlocal pulled
            for i in range(100_000):
                pulled += 1
                yield i

        results = ordered_map(abs, items(), 2)
        assert next(results) == 0
        assert pulled <= DISPATCH_FACTOR * 2
        assert next(results) == 1

    def test_error_stops_the_stream(self):
        def fails_at_three(x: int) -> int:
            if x == 3:
                raise ValueError("bad point")
            return x

        results = ordered_map(fails_at_three, range(1000), 2)
        with pytest.raises(ValueError, match="bad point"):
            list(results)

    def test_chunked(self):
        assert list(chunked(range(7), 3)) == [[0, 1, 2], [3, 4, 5], [6]]
        assert list(chunked([], 3)) == []
