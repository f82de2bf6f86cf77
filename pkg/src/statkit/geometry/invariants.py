"""Statistical curvature invariants of surfaces and the Euler/Wintgen slacks.

Sign conventions:

- G is the sectional curvature of T = ½(R + R*) in the convention of
  ``manifold``; in the self-dual case G = -K (sphere of radius r: -1/r²).
- G⁰ and K̃⁰ use the classical sign (sphere positive, hyperbolic space -1).

Slacks are reported signed: a negative value is a violation.
"""

from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass
from functools import partial

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from statkit.geometry.immersion import (
    AdaptedFrame,
    FundamentalForms,
    SurfaceImmersion,
    WrongCodimension,
    codazzi_residual,
    frames,
    fundamental_forms,
    gauss_equation_residual,
    induced_curvature,
    induced_metric,
    normal_curvature_oracle,
    normal_curvature_tensor,
)
from statkit.geometry.manifold import (
    ConnectionKind,
    CurvatureTensor,
    StatisticalManifold,
    classical_sectional_curvature,
    connection_curvature,
    constant_curvature_residual,
    curvature_duality_residual,
    duality_residual,
)
from statkit.geometry.numerics import (
    DegenerateInput,
    FdScheme,
    Matrix,
    Vector,
    as_vector,
)

logger = logging.getLogger(__name__)

# Smallest admissible area element for sectional curvature
MIN_AREA = 1e-12

QuadForm = Callable[[Vector, Vector, Vector, Vector], float]


class InvariantReport(BaseModel):
    """Invariants at one parameter point. Dimension-specific fields are ``None`` when absent."""

    model_config = ConfigDict(frozen=True)

    u1: float
    u2: float
    G: float  # noqa: N815
    G_perp: float | None = None  # noqa: N815
    G0: float  # noqa: N815
    K0_ambient: float  # noqa: N815
    H_norm: float = Field(ge=0)  # noqa: N815
    H_star_norm: float = Field(ge=0)  # noqa: N815
    euler_slack: float | None = None
    wintgen_slack: float | None = None
    residuals: dict[str, float] = Field(default_factory=dict)
    oracle_residuals: dict[str, float] = Field(default_factory=dict)

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values(), default=0.0)

    @property
    def max_oracle_residual(self) -> float:
        return max(self.oracle_residuals.values(), default=0.0)

    @property
    def slack(self) -> float | None:
        """The inequality slack for this ambient dimension."""
        return self.euler_slack if self.wintgen_slack is None else self.wintgen_slack


@dataclass(frozen=True)
class SlackInputs:
    """The quantities both inequalities are assembled from."""

    dim: int
    G: float  # noqa: N815
    G0: float  # noqa: N815
    K0_ambient: float  # noqa: N815
    H_norm: float  # noqa: N815
    H_star_norm: float  # noqa: N815
    G_perp: float | None = None  # noqa: N815


def t_tensor(
    r: CurvatureTensor,
    r_star: CurvatureTensor,
    g: Matrix,
    x: Vector,
    y: Vector,
    z: Vector,
    w: Vector,
) -> float:
    """T(X, Y, Z, W) = ½[g(R(X, Y)Z, W) + g(R*(X, Y)Z, W)]."""
    return 0.5 * (r.value(g, x, y, z, w) + r_star.value(g, x, y, z, w))


def sectional_curvature(t: QuadForm, g: Matrix, x: Vector, y: Vector) -> float:
    """K(X ∧ Y) = T(X, Y, X, Y) / (g(X, X)g(Y, Y) - g(X, Y)²)."""
    area = float((x @ g @ x) * (y @ g @ y) - (x @ g @ y) ** 2)
    if area < MIN_AREA:
        raise DegenerateInput(f"area element {area:.3e} below {MIN_AREA:g}")
    return t(x, y, x, y) / area


def _resolve_forms(
    m: StatisticalManifold,
    s: SurfaceImmersion,
    u: Vector,
    scheme: FdScheme,
    forms: FundamentalForms | None,
) -> FundamentalForms:
    return forms if forms is not None else fundamental_forms(m, s, u, scheme)


def gauss_curvature(
    m: StatisticalManifold,
    s: SurfaceImmersion,
    u: Vector,
    scheme: FdScheme | None = None,
    *,
    forms: FundamentalForms | None = None,
) -> float:
    """G = K(e1 ∧ e2) from the Gauss equations of ∇ and ∇*.

    G = ½[R̃(e1,e2,e1,e2) + R̃*(e1,e2,e1,e2)]
        - ½ Σ_α (h^α_11 h*^α_22 + h*^α_11 h^α_22) + Σ_α h^α_12 h*^α_12
    """
    scheme = scheme or m.scheme
    u = as_vector(u)
    forms = _resolve_forms(m, s, u, scheme, forms)
    p = s(u)
    metric = m.metric(p)
    e1, e2 = forms.frame.tangent
    r = connection_curvature(m, ConnectionKind.PRIMAL, p, scheme)
    r_star = connection_curvature(m, ConnectionKind.DUAL, p, scheme)
    h, hs = forms.h, forms.h_star
    return (
        t_tensor(r, r_star, metric, e1, e2, e1, e2)
        - 0.5 * float(h[:, 0, 0] @ hs[:, 1, 1] + hs[:, 0, 0] @ h[:, 1, 1])
        + float(h[:, 0, 1] @ hs[:, 0, 1])
    )


def gauss_curvature_oracle(
    m: StatisticalManifold,
    s: SurfaceImmersion,
    u: Vector,
    scheme: FdScheme | None = None,
) -> float:
    """G from finite-difference curvature of the induced connections."""
    scheme = scheme or m.scheme
    u = as_vector(u)
    frame = frames(m, s, u, scheme)
    g_ind = induced_metric(m, s, u, scheme)
    t = partial(
        t_tensor,
        induced_curvature(m, s, u, ConnectionKind.PRIMAL, scheme),
        induced_curvature(m, s, u, ConnectionKind.DUAL, scheme),
        g_ind,
    )
    x, y = frame.tangent_coefficients.T
    return sectional_curvature(t, g_ind, x, y)


def normal_curvature(
    m: StatisticalManifold,
    s: SurfaceImmersion,
    u: Vector,
    scheme: FdScheme | None = None,
    *,
    frame: AdaptedFrame | None = None,
) -> float:
    """G⊥ = ½[g(R⊥(e1, e2)e3, e4) + g(R*⊥(e1, e2)e3, e4)]; the sign follows e4."""
    value, value_star = normal_curvature_tensor(m, s, u, scheme, frame=frame)
    return 0.5 * (value + value_star)


def classical_invariants(
    m: StatisticalManifold,
    s: SurfaceImmersion,
    u: Vector,
    scheme: FdScheme | None = None,
    *,
    forms: FundamentalForms | None = None,
) -> tuple[float, float]:
    """(G⁰, K̃⁰(e1 ∧ e2)) with the classical sign."""
    scheme = scheme or m.scheme
    u = as_vector(u)
    forms = _resolve_forms(m, s, u, scheme, forms)
    p = s(u)
    metric = m.metric(p)
    e1, e2 = forms.frame.tangent
    r0 = connection_curvature(m, ConnectionKind.LEVI_CIVITA, p, scheme)
    k0 = classical_sectional_curvature(r0, metric, e1, e2)
    h0 = forms.h0
    g0 = k0 + float(h0[:, 0, 0] @ h0[:, 1, 1]) - float(h0[:, 0, 1] @ h0[:, 0, 1])
    return g0, k0


def euler_slack(inputs: SlackInputs, c: float) -> float:
    """2‖H‖‖H*‖ - c - G."""
    if inputs.dim != 3:
        raise WrongCodimension(f"Euler slack needs a 3-dimensional ambient, got {inputs.dim}")
    return 2.0 * inputs.H_norm * inputs.H_star_norm - c - inputs.G


def wintgen_slack(inputs: SlackInputs, c: float) -> float:
    """½(‖H‖² + ‖H*‖²) - c + 2K̃⁰ - G - |G⊥| - 2G⁰."""
    if inputs.dim != 4 or inputs.G_perp is None:
        raise WrongCodimension(f"Wintgen slack needs a 4-dimensional ambient, got {inputs.dim}")
    return (
        0.5 * (inputs.H_norm**2 + inputs.H_star_norm**2)
        - c
        + 2.0 * inputs.K0_ambient
        - inputs.G
        - abs(inputs.G_perp)
        - 2.0 * inputs.G0
    )


def proof_step_slack(forms: FundamentalForms, g_perp: float) -> float:
    """¼[‖h11 - h22‖² + ‖h*11 - h*22‖²] + ‖h12‖² + ‖h*12‖² - 2|G⊥|."""
    h, hs = forms.h, forms.h_star
    diff = h[:, 0, 0] - h[:, 1, 1]
    diff_star = hs[:, 0, 0] - hs[:, 1, 1]
    return (
        0.25 * float(diff @ diff + diff_star @ diff_star)
        + float(h[:, 0, 1] @ h[:, 0, 1])
        + float(hs[:, 0, 1] @ hs[:, 0, 1])
        - 2.0 * abs(g_perp)
    )


def h0_consistency_residual(forms: FundamentalForms) -> float:
    """max |2h⁰ - h - h*|."""
    return float(np.max(np.abs(2.0 * forms.h0 - forms.h - forms.h_star)))


def _oracle_residuals(
    m: StatisticalManifold,
    s: SurfaceImmersion,
    u: Vector,
    scheme: FdScheme,
    frame: AdaptedFrame,
    g: float,
) -> dict[str, float]:
    gauss, gauss_star = gauss_equation_residual(m, s, u, scheme)
    codazzi, codazzi_star = codazzi_residual(m, s, u, scheme)
    out = {
        "gauss_equation": max(gauss, gauss_star),
        "codazzi": max(codazzi, codazzi_star),
        "gauss_curvature_gap": abs(g - gauss_curvature_oracle(m, s, u, scheme)),
    }
    if m.dim == 4:
        algebraic = normal_curvature_tensor(m, s, u, scheme, frame=frame)
        direct = normal_curvature_oracle(m, s, u, scheme, frame=frame)
        out["ricci"] = max(abs(a - b) for a, b in zip(algebraic, direct, strict=True))
    return out


def evaluate_point(
    m: StatisticalManifold,
    s: SurfaceImmersion,
    u: Vector,
    c: float,
    scheme: FdScheme | None = None,
    *,
    oracles: bool = False,
) -> InvariantReport:
    """All invariants, slacks and pointwise residuals at parameter point ``u``."""
    if m.dim not in (3, 4):
        raise WrongCodimension(f"surfaces are supported in dimension 3 or 4, got {m.dim}")
    scheme = scheme or m.scheme
    u = as_vector(u)
    frame = frames(m, s, u, scheme)
    forms = fundamental_forms(m, s, u, scheme, frame=frame)
    p = s(u)

    g = gauss_curvature(m, s, u, scheme, forms=forms)
    g0, k0 = classical_invariants(m, s, u, scheme, forms=forms)
    g_perp = normal_curvature(m, s, u, scheme, frame=frame) if m.dim == 4 else None
    inputs = SlackInputs(
        dim=m.dim, G=g, G0=g0, K0_ambient=k0,
        H_norm=forms.H_norm, H_star_norm=forms.H_star_norm, G_perp=g_perp,
    )

    residuals = {
        "duality": duality_residual(m, m.connection(ConnectionKind.DUAL, scheme), p, scheme),
        "curvature_duality": curvature_duality_residual(m, p, scheme),
        "constant_curvature": constant_curvature_residual(m, c, [p], scheme),
        "h0_consistency": h0_consistency_residual(forms),
    }
    if g_perp is not None:
        residuals["proof_step"] = max(0.0, -proof_step_slack(forms, g_perp))

    report = InvariantReport(
        u1=float(u[0]),
        u2=float(u[1]),
        G=g,
        G_perp=g_perp,
        G0=g0,
        K0_ambient=k0,
        H_norm=forms.H_norm,
        H_star_norm=forms.H_star_norm,
        euler_slack=euler_slack(inputs, c) if m.dim == 3 else None,
        wintgen_slack=wintgen_slack(inputs, c) if m.dim == 4 else None,
        residuals=residuals,
        oracle_residuals=_oracle_residuals(m, s, u, scheme, frame, g) if oracles else {},
    )
    logger.debug("u=%s slack=%s max_residual=%.3e", u.tolist(), report.slack, report.max_residual)
    return report
