"""Charted statistical manifolds: Levi-Civita and dual connections, curvature.

Curvature convention (used by every sign-sensitive formula in the package):

    R(X, Y)Z = ∇_X ∇_Y Z - ∇_Y ∇_X Z - ∇_[X,Y] Z
    R(∂_i, ∂_j)∂_k = R^l_kij ∂_l,  stored as ``components[l, k, i, j]``

With it the classical sphere has g(R(e1, e2)e1, e2) = -1.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass, field, replace
from enum import StrEnum
from functools import partial

import numpy as np
import numpy.typing as npt

from statkit.geometry.numerics import (
    Array3,
    ChartBoundary,
    FdScheme,
    Matrix,
    Vector,
    gradient,
    invert_spd,
)

MetricField = Callable[[Vector], Matrix]
ConnectionField = Callable[[Vector], Array3]


class ConnectionKind(StrEnum):
    PRIMAL = "primal"
    DUAL = "dual"
    LEVI_CIVITA = "levi_civita"


@dataclass(frozen=True)
class ChartBox:
    """Axis-aligned chart domain; ``None`` bounds are open. Bounds are strict."""

    lower: tuple[float | None, ...]
    upper: tuple[float | None, ...]

    @classmethod
    def unbounded(cls, dim: int) -> ChartBox:
        return cls(lower=(None,) * dim, upper=(None,) * dim)

    def contains(self, p: Vector, margin: float = 0.0) -> bool:
        for x, lo, hi in zip(p, self.lower, self.upper, strict=True):
            if lo is not None and not x > lo + margin:
                return False
            if hi is not None and not x < hi - margin:
                return False
        return True

    def require(self, p: Vector) -> None:
        if not self.contains(p):
            raise ChartBoundary(f"point {np.asarray(p).tolist()} outside chart domain")


@dataclass(frozen=True)
class StatisticalManifold:
    """A single chart carrying a metric and a primal torsion-free connection.

    Fields are closed-form callables; the dual and Levi-Civita connections
    are derived numerically. Instances are immutable and safe to share.
    """

    dim: int
    chart: ChartBox
    metric_field: MetricField
    primal_field: ConnectionField
    claimed_c: float | None = None
    name: str = ""
    scheme: FdScheme = field(default_factory=FdScheme)

    def metric(self, p: Vector) -> Matrix:
        self.chart.require(p)
        return np.asarray(self.metric_field(p), dtype=np.float64)

    def primal(self, p: Vector) -> Array3:
        self.chart.require(p)
        return np.asarray(self.primal_field(p), dtype=np.float64)

    def levi_civita(self, p: Vector, scheme: FdScheme | None = None) -> Array3:
        return levi_civita(self, p, scheme or self.scheme)

    def dual(self, p: Vector, scheme: FdScheme | None = None) -> Array3:
        return dual_connection(self.primal(p), self.levi_civita(p, scheme))

    def connection(self, kind: ConnectionKind, scheme: FdScheme | None = None) -> ConnectionField:
        """The coefficient field of the requested connection."""
        if kind is ConnectionKind.PRIMAL:
            return self.primal
        if kind is ConnectionKind.DUAL:
            return partial(self.dual, scheme=scheme)
        return partial(self.levi_civita, scheme=scheme)

    def swapped(self, scheme: FdScheme | None = None) -> StatisticalManifold:
        """The structure (∇*, g): primal and dual exchange roles."""
        return replace(
            self,
            primal_field=partial(self.dual, scheme=scheme),
            name=f"{self.name}*" if self.name else "",
        )


@dataclass(frozen=True)
class CurvatureTensor:
    """R^l_kij at a point, ``components[l, k, i, j]``."""

    components: npt.NDArray[np.float64] = field(repr=False)

    @property
    def dim(self) -> int:
        return int(self.components.shape[0])

    def apply(self, x: Vector, y: Vector, z: Vector) -> Vector:
        """The vector R(X, Y)Z."""
        return np.einsum("lkij,i,j,k->l", self.components, x, y, z)

    def covariant(self, metric: Matrix) -> npt.NDArray[np.float64]:
        """``out[i, j, k, l] = g(R(∂_i, ∂_j)∂_k, ∂_l)``."""
        return np.einsum("mkij,ml->ijkl", self.components, metric)

    def value(self, metric: Matrix, x: Vector, y: Vector, z: Vector, w: Vector) -> float:
        """g(R(X, Y)Z, W)."""
        return float(self.apply(x, y, z) @ metric @ w)


def levi_civita(m: StatisticalManifold, p: Vector, scheme: FdScheme) -> Array3:
    """Γ⁰^k_ij = ½ g^kl (∂_i g_jl + ∂_j g_il - ∂_l g_ij), metric derivatives by FD."""
    g_inv = invert_spd(m.metric(p))
    dg = gradient(m.metric, p, scheme, domain=m.chart.contains)  # dg[c, a, b] = ∂_c g_ab
    first_kind = 0.5 * (
        np.einsum("ijl->lij", dg) + np.einsum("jil->lij", dg) - dg
    )  # first_kind[l, i, j]
    return np.einsum("kl,lij->kij", g_inv, first_kind)


def dual_connection(primal: Array3, lc: Array3) -> Array3:
    """Γ* = 2Γ⁰ - Γ."""
    return 2.0 * lc - primal


def curvature(
    conn_field: ConnectionField,
    p: Vector,
    scheme: FdScheme,
    *,
    domain: Callable[[Vector], bool] | None = None,
) -> CurvatureTensor:
    """R^l_kij = ∂_i Γ^l_jk - ∂_j Γ^l_ik + Γ^l_im Γ^m_jk - Γ^l_jm Γ^m_ik."""
    gamma = np.asarray(conn_field(p), dtype=np.float64)
    d_gamma = gradient(conn_field, p, scheme, domain=domain)  # [dir, l, a, b]
    r = (
        np.einsum("iljk->lkij", d_gamma)
        - np.einsum("jlik->lkij", d_gamma)
        + np.einsum("lim,mjk->lkij", gamma, gamma)
        - np.einsum("ljm,mik->lkij", gamma, gamma)
    )
    return CurvatureTensor(components=0.5 * (r - r.transpose(0, 1, 3, 2)))


def connection_curvature(
    m: StatisticalManifold, kind: ConnectionKind, p: Vector, scheme: FdScheme,
) -> CurvatureTensor:
    return curvature(m.connection(kind, scheme), p, scheme, domain=m.chart.contains)


def duality_residual(
    m: StatisticalManifold,
    dual: ConnectionField,
    p: Vector,
    scheme: FdScheme,
) -> float:
    """max |∂_c g(∂_a, ∂_b) - g(∇_c ∂_a, ∂_b) - g(∂_a, ∇*_c ∂_b)| over basis triples."""
    g = m.metric(p)
    gamma = m.primal(p)
    gamma_star = np.asarray(dual(p), dtype=np.float64)
    dg = gradient(m.metric, p, scheme, domain=m.chart.contains)
    residual = (
        dg
        - np.einsum("mca,mb->cab", gamma, g)
        - np.einsum("am,mcb->cab", g, gamma_star)
    )
    return float(np.max(np.abs(residual)))


def constant_curvature_residual(
    m: StatisticalManifold,
    c: float,
    points: Sequence[Vector],
    scheme: FdScheme | None = None,
) -> float:
    """max |g(R(∂_i, ∂_j)∂_k, ∂_l) - c{g_jk g_il - g_ik g_jl}| over points and indices."""
    scheme = scheme or m.scheme
    worst = 0.0
    for p in points:
        g = m.metric(p)
        lowered = connection_curvature(m, ConnectionKind.PRIMAL, p, scheme).covariant(g)
        expected = c * (np.einsum("jk,il->ijkl", g, g) - np.einsum("ik,jl->ijkl", g, g))
        worst = max(worst, float(np.max(np.abs(lowered - expected))))
    return worst


def curvature_duality_residual(
    m: StatisticalManifold, p: Vector, scheme: FdScheme | None = None,
) -> float:
    """max |g(R*(X, Y)Z, W) + g(Z, R(X, Y)W)| over basis tuples."""
    scheme = scheme or m.scheme
    g = m.metric(p)
    r = connection_curvature(m, ConnectionKind.PRIMAL, p, scheme).covariant(g)
    r_star = connection_curvature(m, ConnectionKind.DUAL, p, scheme).covariant(g)
    return float(np.max(np.abs(r_star + r.transpose(0, 1, 3, 2))))


def pair_symmetry_residual(
    m: StatisticalManifold, p: Vector, scheme: FdScheme | None = None,
) -> float:
    """max |g(R⁰(X, Y)Z, W) - g(R⁰(Z, W)X, Y)| for the Levi-Civita curvature."""
    scheme = scheme or m.scheme
    r0 = connection_curvature(m, ConnectionKind.LEVI_CIVITA, p, scheme).covariant(m.metric(p))
    return float(np.max(np.abs(r0 - r0.transpose(2, 3, 0, 1))))


def classical_sectional_curvature(
    r: CurvatureTensor, metric: Matrix, x: Vector, y: Vector,
) -> float:
    """g(R(X, Y)Y, X) / (g(X, X)g(Y, Y) - g(X, Y)²): positive on round spheres."""
    area = float((x @ metric @ x) * (y @ metric @ y) - (x @ metric @ y) ** 2)
    return r.value(metric, x, y, y, x) / area
