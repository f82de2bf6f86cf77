"""Run orchestration: builds fixtures, evaluates points, writes reports.

``run`` never raises for expected failures; they become exit statuses and
error entries in the report file.
"""

from __future__ import annotations

import logging
from collections.abc import Iterable
from dataclasses import dataclass
from functools import partial

from statkit.config import (
    EXIT_CONFIG,
    EXIT_IO,
    EXIT_OK,
    EXIT_RESIDUAL,
    EXIT_VALIDATION,
    EXIT_VIOLATION,
    RunConfig,
)
from statkit.fixtures.catalogue import (
    FixtureError,
    FixtureSpec,
    ValidationFailed,
    build_fixture,
    build_manifold,
    validate_fixture,
    validation_points,
)
from statkit.fixtures.scan import ScanSample, random_scan
from statkit.geometry.invariants import InvariantReport, evaluate_point
from statkit.geometry.numerics import GeometryError
from statkit.report.models import ErrorEntry, ReportArtifact, RunSummary
from statkit.report.writer import IoFailure, emit_error, emit_report, emit_validation
from statkit.suite.pool import ordered_map, worker_count

logger = logging.getLogger(__name__)


@dataclass
class RunOutcome:
    exit_code: int
    artifact: ReportArtifact | None = None
    error: ErrorEntry | None = None


def fixture_spec(config: RunConfig) -> FixtureSpec:
    return FixtureSpec(
        name=config.fixture,
        surface=config.surface,
        radius=config.radius,
        radius2=config.radius2,
        offset=config.offset,
        epsilon=config.epsilon,
        potential=config.potential,
        coefficients=config.coefficients,
        grid=config.grid,
        seed=config.seed,
    )


def summary_exit_code(summary: RunSummary) -> int:
    if summary.slack_violated:
        return EXIT_VIOLATION
    if summary.residual_failed or not summary.passed:
        return EXIT_RESIDUAL
    return EXIT_OK


def _emit_points(config: RunConfig, reports: Iterable[InvariantReport]) -> RunOutcome:
    artifact = emit_report(
        reports,
        config.format,
        config.output_path(),
        tolerance=config.tolerance,
        slack_tolerance=config.slack_tolerance,
        oracle_tolerance=config.oracle_tolerance if config.oracles else None,
    )
    return RunOutcome(exit_code=summary_exit_code(artifact.summary), artifact=artifact)


def _validate(config: RunConfig) -> RunOutcome:
    spec = fixture_spec(config)
    scheme = config.scheme()
    m = build_manifold(spec, scheme)
    validation = validate_fixture(
        m, float(m.claimed_c or 0.0), validation_points(spec.name, spec.seed), scheme,
        tolerance=config.tolerance,
    )
    artifact = emit_validation(validation, config.format, config.output_path())
    return RunOutcome(
        exit_code=EXIT_OK if validation.passed else EXIT_VALIDATION, artifact=artifact,
    )


def _verify(config: RunConfig) -> RunOutcome:
    scheme = config.scheme()
    m, s = build_fixture(fixture_spec(config), scheme, tolerance=config.tolerance)
    if s is None:
        raise FixtureError("verify needs a surface")
    evaluate = partial(
        evaluate_point, m, s, c=float(m.claimed_c or 0.0), scheme=scheme, oracles=config.oracles,
    )
    points = s.sample_points()
    logger.info("verifying %s/%s on %d points", m.name, s.kind, len(points))
    return _emit_points(config, ordered_map(evaluate, points, worker_count(config.threads)))


def _evaluate_sample(sample: ScanSample, config: RunConfig) -> InvariantReport:
    c = float(sample.manifold.claimed_c or 0.0)
    return evaluate_point(
        sample.manifold, sample.surface, sample.point, c, config.scheme(), oracles=config.oracles,
    )


def _scan(config: RunConfig) -> RunOutcome:
    samples = random_scan(
        config.seed, config.count, config.fixture, config.scheme(), tolerance=config.tolerance,
    )
    evaluate = partial(_evaluate_sample, config=config)
    return _emit_points(config, ordered_map(evaluate, samples, worker_count(config.threads)))


_COMMANDS = {"validate": _validate, "verify": _verify, "scan": _scan}


def _fail(config: RunConfig, code: int, kind: str, message: str) -> RunOutcome:
    error = ErrorEntry(kind=kind, message=message)
    logger.error("%s: %s", kind, message)
    try:
        artifact = emit_error(error, config.format, config.output_path())
    except IoFailure as e:
        logger.error("%s", e)
        artifact = None
    return RunOutcome(exit_code=code, artifact=artifact, error=error)


def run(config: RunConfig) -> RunOutcome:
    """Execute one command. Exit codes: 0 pass, 1 residuals, 2 slack violation,
    3 fixture validation or geometry failure, 64 configuration, 74 report I/O."""
    try:
        return _COMMANDS[config.command](config)
    except ValidationFailed as e:
        if e.validation is None:
            return _fail(config, EXIT_VALIDATION, type(e).__name__, str(e))
        logger.error("%s", e)
        try:
            artifact = emit_validation(e.validation, config.format, config.output_path())
        except IoFailure as io:
            logger.error("%s", io)
            artifact = None
        return RunOutcome(
            exit_code=EXIT_VALIDATION,
            artifact=artifact,
            error=ErrorEntry(kind=type(e).__name__, message=str(e)),
        )
    except FixtureError as e:
        return _fail(config, EXIT_CONFIG, type(e).__name__, str(e))
    except GeometryError as e:
        return _fail(config, EXIT_VALIDATION, type(e).__name__, str(e))
    except IoFailure as e:
        logger.error("%s", e)
        return RunOutcome(exit_code=EXIT_IO, error=ErrorEntry(kind="IoFailure", message=str(e)))
