"""Fixture catalogue: closed-form statistical manifolds and surfaces, validated before use."""

from __future__ import annotations

import itertools
import logging
from collections.abc import Sequence
from functools import cache
from pathlib import Path
from typing import Any, Literal

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field

from statkit.config import CATALOGUE_PATH, DEFAULT_TOLERANCE, LATTICE_PER_AXIS, RANDOM_SAMPLES
from statkit.geometry.immersion import ParameterBox, SurfaceImmersion
from statkit.geometry.manifold import (
    ChartBox,
    ConnectionKind,
    StatisticalManifold,
    constant_curvature_residual,
    curvature_duality_residual,
    duality_residual,
)
from statkit.geometry.numerics import FdScheme, Vector, as_vector, is_spd
from statkit.report.models import FixtureValidation

logger = logging.getLogger(__name__)

# Chart margin, in outer steps, required around every surface sample point
STENCIL_MARGIN_STEPS = 10


class FixtureError(Exception):
    """A fixture cannot be built as requested."""


class UnknownFixture(FixtureError):
    """Fixture or surface name not in the catalogue."""


class ValidationFailed(FixtureError):
    """A fixture failed its numerical self-checks."""

    def __init__(self, message: str, validation: FixtureValidation | None = None) -> None:
        super().__init__(message)
        self.validation = validation


class FixtureSpec(BaseModel):
    """A catalogue manifold plus an optional surface; ``None`` fields take catalogue defaults."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str
    surface: str | None = None
    radius: float | None = Field(None, gt=0)
    radius2: float | None = Field(None, gt=0)
    offset: float | None = None
    epsilon: float | None = Field(None, ge=0)
    potential: Literal["exp", "cubic"] | None = None
    coefficients: list[list[float]] | None = None
    claimed_c: float | None = None
    grid: int = Field(17, ge=2)
    seed: int = 0


@cache
def load_catalogue(path: Path = CATALOGUE_PATH) -> dict[str, Any]:
    """Load the catalogue YAML file."""
    with open(path) as f:
        data = yaml.safe_load(f)
    return data or {"manifolds": {}, "surfaces": {}}


def manifold_entry(name: str) -> dict[str, Any]:
    manifolds = load_catalogue()["manifolds"]
    if name not in manifolds:
        known = ", ".join(sorted(manifolds))
        raise UnknownFixture(f"unknown fixture '{name}' (known: {known})")
    return dict(manifolds[name])


def surface_entry(kind: str) -> dict[str, Any]:
    surfaces = load_catalogue()["surfaces"]
    if kind not in surfaces:
        known = ", ".join(sorted(surfaces))
        raise UnknownFixture(f"unknown surface '{kind}' (known: {known})")
    return dict(surfaces[kind])


# --- Manifold families ---

def _euclidean(dim: int, scheme: FdScheme, c: float, name: str) -> StatisticalManifold:
    return StatisticalManifold(
        dim=dim,
        chart=ChartBox.unbounded(dim),
        metric_field=lambda p: np.eye(dim),
        primal_field=lambda p: np.zeros((dim, dim, dim)),
        claimed_c=c,
        name=name,
        scheme=scheme,
    )


def _upper_half_space(dim: int, scheme: FdScheme, c: float, name: str) -> StatisticalManifold:
    """g = (y^n)⁻² Σ dy^k dy^k with Γ^n_nn = 1/y^n, Γ^n_ij = 2δ_ij/y^n (i, j < n)."""

    def metric(p: Vector) -> np.ndarray:
        return np.eye(dim) / p[-1] ** 2

    def primal(p: Vector) -> np.ndarray:
        t = p[-1]
        gamma = np.zeros((dim, dim, dim))
        gamma[-1, -1, -1] = 1.0 / t
        for i in range(dim - 1):
            gamma[-1, i, i] = 2.0 / t
        return gamma

    return StatisticalManifold(
        dim=dim,
        chart=ChartBox(lower=(None,) * (dim - 1) + (0.0,), upper=(None,) * dim),
        metric_field=metric,
        primal_field=primal,
        claimed_c=c,
        name=name,
        scheme=scheme,
    )


def _hessian_potential(
    dim: int,
    scheme: FdScheme,
    c: float,
    name: str,
    *,
    potential: str,
    epsilon: float,
    chart_radius: float,
) -> StatisticalManifold:
    """Flat primal connection; metric is the Hessian of a convex potential.

    ``exp``:   ½|y|² + ε exp(Σ y^k)  ->  g = I + ε exp(Σ y^k) 11ᵀ
    ``cubic``: ½|y|² + (ε/6)(y^1)³   ->  g = I + ε y^1 E_11
    """
    ones = np.ones((dim, dim))

    def metric(p: Vector) -> np.ndarray:
        if potential == "exp":
            return np.eye(dim) + epsilon * np.exp(np.sum(p)) * ones
        g = np.eye(dim)
        g[0, 0] += epsilon * p[0]
        return g

    return StatisticalManifold(
        dim=dim,
        chart=ChartBox(lower=(-chart_radius,) * dim, upper=(chart_radius,) * dim),
        metric_field=metric,
        primal_field=lambda p: np.zeros((dim, dim, dim)),
        claimed_c=c,
        name=name,
        scheme=scheme,
    )


def build_manifold(spec: FixtureSpec, scheme: FdScheme | None = None) -> StatisticalManifold:
    entry = manifold_entry(spec.name)
    scheme = scheme or FdScheme()
    dim = int(entry["dim"])
    c = float(entry["claimed_c"] if spec.claimed_c is None else spec.claimed_c)
    family = entry["family"]
    if family == "euclidean":
        return _euclidean(dim, scheme, c, spec.name)
    if family == "upper-half-space":
        return _upper_half_space(dim, scheme, c, spec.name)
    if family == "hessian-potential":
        return _hessian_potential(
            dim, scheme, c, spec.name,
            potential=spec.potential or entry["potential"],
            epsilon=float(entry["epsilon"] if spec.epsilon is None else spec.epsilon),
            chart_radius=float(entry["chart_radius"]),
        )
    raise FixtureError(f"catalogue entry '{spec.name}' has unknown family '{family}'")


# --- Surfaces ---

MONOMIALS = ("1", "u", "v", "u^2", "uv", "v^2")


def _monomials(u: Vector) -> Vector:
    a, b = u
    return as_vector((1.0, a, b, a * a, a * b, b * b))


def graph_surface(
    base: Sequence[float],
    coefficients: Sequence[Sequence[float]],
    domain: ParameterBox,
    grid: int = 17,
) -> SurfaceImmersion:
    """f(u, v) = base + (u, v, ψ_1, ..., ψ_k) with ψ quadratic in (u, v)."""
    origin = as_vector(base)
    coeffs = np.asarray(coefficients, dtype=np.float64)
    if coeffs.shape != (len(origin) - 2, len(MONOMIALS)):
        raise FixtureError(
            f"graph needs {len(origin) - 2} coefficient rows of {len(MONOMIALS)} "
            f"({', '.join(MONOMIALS)}), got shape {coeffs.shape}"
        )

    def f(u: Vector) -> Vector:
        return origin + np.concatenate([u, coeffs @ _monomials(u)])

    return SurfaceImmersion(map=f, parameter_domain=domain, grid=grid, kind="graph")


def build_surface(spec: FixtureSpec, m: StatisticalManifold) -> SurfaceImmersion | None:
    if spec.surface is None:
        return None
    entry = surface_entry(spec.surface)
    base = as_vector(manifold_entry(spec.name)["base"])
    domain = ParameterBox(
        lower=tuple(entry["u_lower"]),  # type: ignore[arg-type]
        upper=tuple(entry["u_upper"]),  # type: ignore[arg-type]
    )
    dim = m.dim
    kind = spec.surface

    if kind == "graph":
        rows = spec.coefficients or entry["coefficients"][: dim - 2]
        return graph_surface(base, rows, domain, spec.grid)

    if kind == "plane":
        def f(u: Vector) -> Vector:
            return base + np.concatenate([u, np.zeros(dim - 2)])

    elif kind == "horosphere":
        offset = float(entry["offset"] if spec.offset is None else spec.offset)

        def f(u: Vector) -> Vector:
            p = base.copy()
            p[:2] = u
            p[-1] = offset
            return p

    elif kind == "sphere":
        r = float(spec.radius or entry["radius"])

        def f(u: Vector) -> Vector:
            a, b = u
            shell = r * as_vector((np.sin(a) * np.cos(b), np.sin(a) * np.sin(b), np.cos(a)))
            return base + np.concatenate([shell, np.zeros(dim - 3)])

    elif kind == "torus":
        if dim != 4:
            raise UnknownFixture(f"surface 'torus' needs a 4-dimensional fixture, got {dim}")
        a_r = float(spec.radius or entry["radius"])
        b_r = float(spec.radius2 or entry["radius2"])

        def f(u: Vector) -> Vector:
            a, b = u
            return base + as_vector(
                (a_r * np.cos(a), a_r * np.sin(a), b_r * np.cos(b), b_r * np.sin(b))
            )

    else:
        raise UnknownFixture(f"surface '{kind}' has no builder")

    return SurfaceImmersion(map=f, parameter_domain=domain, grid=spec.grid, kind=kind)


def check_surface(m: StatisticalManifold, s: SurfaceImmersion, scheme: FdScheme) -> None:
    """Every grid point must sit inside the chart with room for the outer stencils."""
    margin = STENCIL_MARGIN_STEPS * scheme.outer_step
    for u in s.sample_points():
        p = s(u)
        if not m.chart.contains(p, margin=margin):
            raise ValidationFailed(
                f"surface '{s.kind}' point {p.tolist()} at u={u.tolist()} is within "
                f"{margin:g} of the chart boundary of '{m.name}'"
            )


# --- Validation ---

def validation_points(name: str, seed: int = 0) -> list[Vector]:
    """3-per-axis lattice over the fixture's sample box plus seeded random points."""
    entry = manifold_entry(name)
    lower = as_vector(entry["sample_lower"])
    upper = as_vector(entry["sample_upper"])
    axes = [np.linspace(lo, hi, LATTICE_PER_AXIS) for lo, hi in zip(lower, upper, strict=True)]
    lattice = [as_vector(p) for p in itertools.product(*axes)]
    rng = np.random.default_rng(seed)
    extra = rng.uniform(lower, upper, size=(RANDOM_SAMPLES, len(lower)))
    return lattice + [as_vector(p) for p in extra]


def validate_fixture(
    m: StatisticalManifold,
    claimed_c: float,
    points: Sequence[Vector],
    scheme: FdScheme | None = None,
    *,
    tolerance: float = DEFAULT_TOLERANCE,
) -> FixtureValidation:
    """Duality, constant curvature of ∇ and ∇*, curvature duality and positivity at ``points``."""
    scheme = scheme or m.scheme
    swapped = m.swapped(scheme)
    metric_spd = all(is_spd(m.metric(p)) for p in points)
    if not metric_spd:
        # curvature checks need an invertible metric
        nan = float("nan")
        return FixtureValidation(
            fixture=m.name, claimed_c=claimed_c, points=len(points), tolerance=tolerance,
            duality=nan, constant_curvature=nan, dual_constant_curvature=nan,
            curvature_duality=nan, metric_spd=False,
        )
    dual = m.connection(ConnectionKind.DUAL, scheme)
    validation = FixtureValidation(
        fixture=m.name,
        claimed_c=claimed_c,
        points=len(points),
        tolerance=tolerance,
        duality=max(duality_residual(m, dual, p, scheme) for p in points),
        constant_curvature=constant_curvature_residual(m, claimed_c, points, scheme),
        dual_constant_curvature=constant_curvature_residual(swapped, claimed_c, points, scheme),
        curvature_duality=max(curvature_duality_residual(m, p, scheme) for p in points),
        metric_spd=True,
    )
    logger.info(
        "validated %s: max residual %.3e (tolerance %g) -> %s",
        m.name, validation.max_residual, tolerance, "pass" if validation.passed else "fail",
    )
    return validation


def build_fixture(
    spec: FixtureSpec,
    scheme: FdScheme | None = None,
    *,
    tolerance: float = DEFAULT_TOLERANCE,
    validate: bool = True,
) -> tuple[StatisticalManifold, SurfaceImmersion | None]:
    """Build the manifold (and surface) of ``spec``; with ``validate`` reject failing fixtures."""
    scheme = scheme or FdScheme()
    m = build_manifold(spec, scheme)
    if validate:
        validation = validate_fixture(
            m, float(m.claimed_c or 0.0), validation_points(spec.name, spec.seed), scheme,
            tolerance=tolerance,
        )
        if not validation.passed:
            raise ValidationFailed(
                f"fixture '{spec.name}' failed validation "
                f"(max residual {validation.max_residual:.3e} > {tolerance:g})",
                validation,
            )
    s = build_surface(spec, m)
    if s is not None:
        check_surface(m, s, scheme)
    return m, s
