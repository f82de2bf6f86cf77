"""Statkit CLI: entry point for all commands."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any

import typer
from rich import print as rprint
from rich.logging import RichHandler
from rich.table import Table

from statkit import __version__


def version_callback(value: bool) -> None:
    if value:
        typer.echo(f"statkit {__version__}")
        raise typer.Exit()


app = typer.Typer(
    name="statkit",
    help="Curvature invariants and inequalities for surfaces in statistical manifolds.",
    no_args_is_help=True,
)


@app.callback()
def main(
    version: bool | None = typer.Option(  # noqa: N803
        None, "--version", "-V", callback=version_callback, is_eager=True,
        help="Show version and exit.",
    ),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Log at debug level."),
) -> None:
    """Statkit: statistical surface geometry checks."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(message)s",
        handlers=[RichHandler(show_path=False)],
        force=True,
    )


# Options shared by the run commands; None means "take the config file or default"
CONFIG = typer.Option(None, "--config", help="key=value config file (flags override it)")
FIXTURE = typer.Option(None, "--fixture", help="Catalogue fixture name")
GRID = typer.Option(None, "--grid", help="Grid points per parameter axis")
FD_STEP = typer.Option(None, "--fd-step", help="Central-difference step")
OUTER_STEP = typer.Option(None, "--outer-step", help="Step for differencing FD products")
TOLERANCE = typer.Option(None, "--tolerance", help="Residual tolerance")
SLACK_TOLERANCE = typer.Option(None, "--slack-tolerance", help="Allowed negative slack")
ORACLE_TOLERANCE = typer.Option(None, "--oracle-tolerance", help="FD oracle tolerance")
SEED = typer.Option(None, "--seed", help="Random seed")
OUTPUT = typer.Option(None, "--output", "-o", help="Report path")
FORMAT = typer.Option(None, "--format", help="json or csv")
THREADS = typer.Option(None, "--threads", help="Worker threads")
EPSILON = typer.Option(None, "--epsilon", help="Hessian potential coupling")
POTENTIAL = typer.Option(None, "--potential", help="Hessian potential: exp or cubic")
ORACLES = typer.Option(None, "--oracles/--no-oracles", help="Add FD oracle residuals")


def _execute(command: str, config_path: Path | None, flags: dict[str, Any]) -> None:
    from statkit.config import EXIT_CONFIG, ConfigError, build_config, load_config_file
    from statkit.suite.run import run

    try:
        file_values = load_config_file(config_path) if config_path else None
        config = build_config(file_values, {"command": command, **flags})
    except ConfigError as e:
        rprint(f"[red]Config error:[/red] {e}")
        raise typer.Exit(EXIT_CONFIG) from e

    outcome = run(config)
    if outcome.error is not None:
        rprint(f"[red]{outcome.error.kind}:[/red] {outcome.error.message}")
    if outcome.artifact is not None:
        summary = outcome.artifact.summary
        color = "green" if summary.passed else "red"
        rprint(f"[{color}]{command}: {'PASS' if summary.passed else 'FAIL'}[/{color}]")
        if summary.min_slack is not None:
            rprint(f"  min slack:    {summary.min_slack:.3e}")
        if summary.max_residual is not None:
            rprint(f"  max residual: {summary.max_residual:.3e}")
        rprint(f"  Report: {outcome.artifact.path}")
        rprint(f"  sha256: {outcome.artifact.sha256}")
    if outcome.exit_code:
        raise typer.Exit(outcome.exit_code)


@app.command()
def validate(
    fixture: str | None = FIXTURE,
    config: Path | None = CONFIG,
    epsilon: float | None = EPSILON,
    potential: str | None = POTENTIAL,
    fd_step: float | None = FD_STEP,
    outer_step: float | None = OUTER_STEP,
    tolerance: float | None = TOLERANCE,
    seed: int | None = SEED,
    output: Path | None = OUTPUT,
    fmt: str | None = FORMAT,
) -> None:
    """Check a fixture's duality and constant-curvature claims."""
    _execute("validate", config, {
        "fixture": fixture, "epsilon": epsilon, "potential": potential,
        "fd_step": fd_step, "outer_step": outer_step, "tolerance": tolerance,
        "seed": seed, "output": output, "format": fmt,
    })


@app.command()
def verify(
    fixture: str | None = FIXTURE,
    surface: str | None = typer.Option(None, "--surface", help="Surface kind"),
    radius: float | None = typer.Option(None, "--radius", help="Sphere or torus radius"),
    radius2: float | None = typer.Option(None, "--radius2", help="Second torus radius"),
    offset: float | None = typer.Option(None, "--offset", help="Horosphere height"),
    config: Path | None = CONFIG,
    epsilon: float | None = EPSILON,
    potential: str | None = POTENTIAL,
    grid: int | None = GRID,
    fd_step: float | None = FD_STEP,
    outer_step: float | None = OUTER_STEP,
    tolerance: float | None = TOLERANCE,
    slack_tolerance: float | None = SLACK_TOLERANCE,
    oracle_tolerance: float | None = ORACLE_TOLERANCE,
    oracles: bool | None = ORACLES,
    output: Path | None = OUTPUT,
    fmt: str | None = FORMAT,
    threads: int | None = THREADS,
) -> None:
    """Evaluate invariants and slacks over a surface's parameter grid."""
    _execute("verify", config, {
        "fixture": fixture, "surface": surface, "radius": radius, "radius2": radius2,
        "offset": offset, "epsilon": epsilon, "potential": potential, "grid": grid,
        "fd_step": fd_step, "outer_step": outer_step, "tolerance": tolerance,
        "slack_tolerance": slack_tolerance, "oracle_tolerance": oracle_tolerance,
        "oracles": oracles, "output": output, "format": fmt, "threads": threads,
    })


@app.command()
def scan(
    fixture: str | None = FIXTURE,
    count: int | None = typer.Option(None, "--count", help="Number of random surfaces"),
    seed: int | None = SEED,
    config: Path | None = CONFIG,
    fd_step: float | None = FD_STEP,
    outer_step: float | None = OUTER_STEP,
    tolerance: float | None = TOLERANCE,
    slack_tolerance: float | None = SLACK_TOLERANCE,
    oracle_tolerance: float | None = ORACLE_TOLERANCE,
    oracles: bool | None = ORACLES,
    output: Path | None = OUTPUT,
    fmt: str | None = FORMAT,
    threads: int | None = THREADS,
) -> None:
    """Evaluate one random graph surface point per sample."""
    _execute("scan", config, {
        "fixture": fixture, "count": count, "seed": seed,
        "fd_step": fd_step, "outer_step": outer_step, "tolerance": tolerance,
        "slack_tolerance": slack_tolerance, "oracle_tolerance": oracle_tolerance,
        "oracles": oracles, "output": output, "format": fmt, "threads": threads,
    })


@app.command()
def status() -> None:
    """Show statkit configuration."""
    from statkit.config import (
        CATALOGUE_PATH,
        DEFAULT_FD_STEP,
        DEFAULT_TOLERANCE,
        REPORTS_OUT,
        THREADS_ENV,
    )
    from statkit.suite.pool import worker_count

    typer.echo(f"statkit {__version__}")
    typer.echo(f"  catalogue: {CATALOGUE_PATH}")
    typer.echo(f"  reports:   {REPORTS_OUT}")
    typer.echo(f"  fd step:   {DEFAULT_FD_STEP:g}  tolerance: {DEFAULT_TOLERANCE:g}")
    typer.echo(f"  workers:   {worker_count()} (${THREADS_ENV} caps)")


@app.command()
def fixtures() -> None:
    """List catalogue manifolds and surface kinds."""
    from statkit.fixtures.catalogue import load_catalogue

    catalogue = load_catalogue()
    table = Table(title="Fixtures")
    table.add_column("Name")
    table.add_column("Dim")
    table.add_column("c")
    table.add_column("Description")
    for name, entry in catalogue["manifolds"].items():
        table.add_row(
            name, str(entry["dim"]), str(entry["claimed_c"]), entry.get("description", ""),
        )
    rprint(table)
    rprint(f"Surfaces: {', '.join(catalogue['surfaces'])}")
