"""Surfaces in a statistical manifold: frames, dual fundamental forms, structure equations.

Fundamental forms are computed in the coordinate basis of the parameter
domain and transformed to the orthonormal tangent frame. Derivatives of
quantities that are themselves finite-difference products (induced
Christoffels, frame fields, normal parts of h) use ``FdScheme.outer_step``.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, replace
from functools import partial

import numpy as np
import numpy.typing as npt

from statkit.geometry.manifold import (
    ConnectionKind,
    CurvatureTensor,
    StatisticalManifold,
    connection_curvature,
    curvature,
)
from statkit.geometry.numerics import (
    DegenerateInput,
    FdScheme,
    GeometryError,
    Matrix,
    Vector,
    as_vector,
    basis_vector,
    central_diff,
    gradient,
    gram_schmidt,
    invert_spd,
)

# Immersion condition: det of the pulled-back metric
IMMERSION_MIN_DET = 1e-8

Array = npt.NDArray[np.float64]


class WrongCodimension(GeometryError):
    """Operation needs a different ambient dimension."""


@dataclass(frozen=True)
class ParameterBox:
    lower: tuple[float, float]
    upper: tuple[float, float]

    def lattice(self, n: int) -> list[Vector]:
        """n x n points including the box corners, u1-major order."""
        u1 = np.linspace(self.lower[0], self.upper[0], n)
        u2 = np.linspace(self.lower[1], self.upper[1], n)
        return [as_vector((a, b)) for a in u1 for b in u2]

    def contains(self, u: Vector) -> bool:
        return bool(
            self.lower[0] <= u[0] <= self.upper[0] and self.lower[1] <= u[1] <= self.upper[1]
        )


@dataclass(frozen=True)
class SurfaceImmersion:
    """A smooth map from a planar parameter box into the chart."""

    map: Callable[[Vector], Vector]
    parameter_domain: ParameterBox
    grid: int = 17
    kind: str = ""

    def __call__(self, u: Vector) -> Vector:
        return as_vector(self.map(as_vector(u)))

    def tangents(self, u: Vector, scheme: FdScheme) -> Matrix:
        """Rows ∂_1 f, ∂_2 f."""
        return gradient(self, u, scheme)

    def second_derivatives(self, u: Vector, scheme: FdScheme) -> Array:
        """``out[a, b] = ∂_a ∂_b f`` by nested central differences at ``second_step``."""
        h = scheme.second_step
        out = np.empty((2, 2, len(self(u))))
        for a in range(2):
            for b in range(a, 2):
                inner_diff = partial(
                    central_diff, self, direction_index=b, scheme=scheme, step=h,
                )
                out[a, b] = central_diff(inner_diff, u, a, scheme, step=h)
                out[b, a] = out[a, b]
        return out

    def sample_points(self) -> list[Vector]:
        return self.parameter_domain.lattice(self.grid)


@dataclass(frozen=True)
class AdaptedFrame:
    """g̃-orthonormal frame at f(u); rows e_1, e_2 tangent, the rest normal.

    ``tangent_coefficients[a, i]`` expresses e_i = Σ_a P[a, i] ∂_a f.
    ``seeds`` are the chart axes that seeded the normals and ``flipped``
    records the orientation fix, so neighbouring frames can be built the
    same way.
    """

    vectors: Array
    tangent_coefficients: Matrix
    seeds: tuple[int, ...]
    flipped: bool

    @property
    def tangent(self) -> Array:
        return self.vectors[:2]

    @property
    def normal(self) -> Array:
        return self.vectors[2:]

    @property
    def codim(self) -> int:
        return int(self.vectors.shape[0]) - 2

    def with_last_flipped(self) -> AdaptedFrame:
        vectors = self.vectors.copy()
        vectors[-1] = -vectors[-1]
        return replace(self, vectors=vectors, flipped=not self.flipped)


@dataclass(frozen=True)
class FundamentalForms:
    """Frame components ``h[α, i, j] = g̃(h(e_i, e_j), e_{2+α})`` and their duals."""

    frame: AdaptedFrame
    h: Array
    h_star: Array
    h0: Array

    def shape_operator(self, xi: Vector) -> Matrix:
        """A_ξ in the tangent frame for ξ = Σ ξ^α e_{2+α}."""
        return np.einsum("a,aij->ij", xi, self.h)

    def shape_operator_star(self, xi: Vector) -> Matrix:
        return np.einsum("a,aij->ij", xi, self.h_star)

    @property
    def mean_curvature(self) -> Vector:
        """Normal-frame components of H."""
        return 0.5 * (self.h[:, 0, 0] + self.h[:, 1, 1])

    @property
    def mean_curvature_star(self) -> Vector:
        return 0.5 * (self.h_star[:, 0, 0] + self.h_star[:, 1, 1])

    @property
    def H_norm(self) -> float:  # noqa: N802
        return float(np.linalg.norm(self.mean_curvature))

    @property
    def H_star_norm(self) -> float:  # noqa: N802
        return float(np.linalg.norm(self.mean_curvature_star))

    def mean_vector(self) -> Vector:
        return self.mean_curvature @ self.frame.normal

    def swapped(self) -> FundamentalForms:
        return replace(self, h=self.h_star, h_star=self.h)


def _induced_metric(metric: Matrix, jac: Matrix) -> Matrix:
    return jac @ metric @ jac.T


def _require_immersion(g_ind: Matrix, u: Vector) -> None:
    det = float(np.linalg.det(g_ind))
    if det < IMMERSION_MIN_DET:
        raise DegenerateInput(
            f"pulled-back metric determinant {det:.3e} at u={u.tolist()} "
            f"(< {IMMERSION_MIN_DET:g})"
        )


def _tangent_frame(metric: Matrix, jac: Matrix) -> list[Vector]:
    return gram_schmidt([jac[0], jac[1]], metric)


def _normal_part(v: Vector, tangent: Array, metric: Matrix) -> Vector:
    return v - (tangent @ metric @ v) @ tangent


def _ambient_second_derivatives(
    m: StatisticalManifold,
    kind: ConnectionKind,
    p: Vector,
    jac: Matrix,
    hess: Array,
    scheme: FdScheme,
) -> Array:
    """``out[a, b] = ∇̃_{∂_a f} ∂_b f = ∂_a∂_b f + Γ(∂_a f, ∂_b f)``."""
    gamma = m.connection(kind, scheme)(p)
    return hess + np.einsum("kij,ai,bj->abk", gamma, jac, jac)


def frames(
    m: StatisticalManifold,
    s: SurfaceImmersion,
    u: Vector,
    scheme: FdScheme | None = None,
    *,
    seeds: tuple[int, ...] | None = None,
    flip: bool | None = None,
) -> AdaptedFrame:
    """Adapted orthonormal frame at f(u).

    Normals are Gram-Schmidt completions of the chart axes whose projections
    off the tangent plane have the largest g̃-norms (ties broken by index).
    In dimension 4 the last normal is flipped to make the frame positive.
    """
    scheme = scheme or m.scheme
    u = as_vector(u)
    p = s(u)
    metric = m.metric(p)
    jac = s.tangents(u, scheme)
    g_ind = _induced_metric(metric, jac)
    _require_immersion(g_ind, u)
    tangent = _tangent_frame(metric, jac)
    codim = m.dim - 2
    if seeds is None:
        t = np.array(tangent)
        norms = []
        for i in range(m.dim):
            w = _normal_part(basis_vector(m.dim, i), t, metric)
            norms.append(float(np.sqrt(max(w @ metric @ w, 0.0))))
        seeds = tuple(sorted(range(m.dim), key=lambda i: -norms[i])[:codim])
    seed_vectors = [basis_vector(m.dim, i) for i in seeds]
    vectors = np.array(gram_schmidt(tangent + seed_vectors, metric))
    if flip is None:
        flip = m.dim == 4 and float(np.linalg.det(vectors)) < 0.0
    if flip:
        vectors[-1] = -vectors[-1]
    coefficients = invert_spd(g_ind) @ jac @ metric @ vectors[:2].T
    return AdaptedFrame(
        vectors=vectors, tangent_coefficients=coefficients, seeds=seeds, flipped=flip,
    )


def fundamental_forms(
    m: StatisticalManifold,
    s: SurfaceImmersion,
    u: Vector,
    scheme: FdScheme | None = None,
    *,
    frame: AdaptedFrame | None = None,
) -> FundamentalForms:
    """h, h*, h⁰ in the adapted frame via the Gauss formulas of each connection."""
    scheme = scheme or m.scheme
    u = as_vector(u)
    frame = frame or frames(m, s, u, scheme)
    p = s(u)
    metric = m.metric(p)
    jac = s.tangents(u, scheme)
    hess = s.second_derivatives(u, scheme)
    coeffs = frame.tangent_coefficients

    def in_frame(kind: ConnectionKind) -> Array:
        v = _ambient_second_derivatives(m, kind, p, jac, hess, scheme)
        coord = np.einsum("abk,kl,ql->qab", v, metric, frame.normal)
        h = np.einsum("qab,ai,bj->qij", coord, coeffs, coeffs)
        return 0.5 * (h + h.transpose(0, 2, 1))

    return FundamentalForms(
        frame=frame,
        h=in_frame(ConnectionKind.PRIMAL),
        h_star=in_frame(ConnectionKind.DUAL),
        h0=in_frame(ConnectionKind.LEVI_CIVITA),
    )


def frame_fundamental_forms(
    m: StatisticalManifold,
    s: SurfaceImmersion,
    u: Vector,
    scheme: FdScheme | None = None,
) -> tuple[Array, Array]:
    """h and h* from ∇̃_{e_i} e_j with e_j the Gram-Schmidt tangent fields along f."""
    scheme = scheme or m.scheme
    u = as_vector(u)
    frame = frames(m, s, u, scheme)
    p = s(u)
    metric = m.metric(p)
    jac = s.tangents(u, scheme)

    def tangent_fields(v: Vector) -> Array:
        return np.array(_tangent_frame(m.metric(s(v)), s.tangents(v, scheme)))

    d_tangent = gradient(tangent_fields, u, scheme.outer())  # [a, j, k]
    result = []
    for kind in (ConnectionKind.PRIMAL, ConnectionKind.DUAL):
        gamma = m.connection(kind, scheme)(p)
        # along[a, j] = ∇̃_{∂_a f} e_j
        along = d_tangent + np.einsum("kij,ai,bj->abk", gamma, jac, frame.tangent)
        directional = np.einsum("ai,abk->ibk", frame.tangent_coefficients, along)
        h = np.einsum("ijk,kl,ql->qij", directional, metric, frame.normal)
        result.append(h)
    return result[0], result[1]


def induced_christoffel(
    m: StatisticalManifold,
    s: SurfaceImmersion,
    u: Vector,
    kind: ConnectionKind,
    scheme: FdScheme,
) -> Array:
    """Christoffels ``γ[c, a, b]`` of the induced connection in parameter coordinates."""
    u = as_vector(u)
    p = s(u)
    metric = m.metric(p)
    jac = s.tangents(u, scheme)
    g_ind = _induced_metric(metric, jac)
    v = _ambient_second_derivatives(m, kind, p, jac, s.second_derivatives(u, scheme), scheme)
    tangential = np.einsum("abk,kl,dl->dab", v, metric, jac)
    return np.einsum("cd,dab->cab", invert_spd(g_ind), tangential)


def induced_curvature(
    m: StatisticalManifold,
    s: SurfaceImmersion,
    u: Vector,
    kind: ConnectionKind,
    scheme: FdScheme,
) -> CurvatureTensor:
    """Curvature of the induced connection, by differencing its Christoffels."""
    field = partial(induced_christoffel, m, s, kind=kind, scheme=scheme)
    return curvature(field, as_vector(u), scheme.outer())


def induced_metric(
    m: StatisticalManifold, s: SurfaceImmersion, u: Vector, scheme: FdScheme,
) -> Matrix:
    u = as_vector(u)
    return _induced_metric(m.metric(s(u)), s.tangents(u, scheme))


def _frame_value(r: CurvatureTensor, metric: Matrix, x: Vector, y: Vector) -> float:
    """g(R(X, Y)X, Y)."""
    return r.value(metric, x, y, x, y)


def gauss_equation_residual(
    m: StatisticalManifold,
    s: SurfaceImmersion,
    u: Vector,
    scheme: FdScheme | None = None,
) -> tuple[float, float]:
    """Residuals of the Gauss equations of ∇ and ∇* on (e1, e2, e1, e2)."""
    scheme = scheme or m.scheme
    u = as_vector(u)
    forms = fundamental_forms(m, s, u, scheme)
    p = s(u)
    metric = m.metric(p)
    e1, e2 = forms.frame.tangent
    x, y = forms.frame.tangent_coefficients.T
    g_ind = induced_metric(m, s, u, scheme)
    h, hs = forms.h, forms.h_star

    out = []
    for kind, first, second in (
        (ConnectionKind.PRIMAL, h, hs),
        (ConnectionKind.DUAL, hs, h),
    ):
        ambient = _frame_value(connection_curvature(m, kind, p, scheme), metric, e1, e2)
        intrinsic = _frame_value(induced_curvature(m, s, u, kind, scheme), g_ind, x, y)
        rhs = (
            intrinsic
            + float(first[:, 0, 0] @ second[:, 1, 1])
            - float(second[:, 0, 1] @ first[:, 1, 0])
        )
        out.append(abs(ambient - rhs))
    return out[0], out[1]


def codazzi_residual(
    m: StatisticalManifold,
    s: SurfaceImmersion,
    u: Vector,
    scheme: FdScheme | None = None,
) -> tuple[float, float]:
    """Normal-component structure equation with X = ∂_1, Y = ∂_2, Z ∈ {∂_1, ∂_2}.

    Uses the antisymmetrized form
    ∇⊥_X h(Y, Z) - h(∇_X Y, Z) - h(Y, ∇_X Z) - [X <-> Y].
    """
    scheme = scheme or m.scheme
    u = as_vector(u)
    p = s(u)
    metric = m.metric(p)
    jac = s.tangents(u, scheme)
    tangent = np.array(_tangent_frame(metric, jac))

    out = []
    for kind in (ConnectionKind.PRIMAL, ConnectionKind.DUAL):

        def normal_parts(v: Vector, kind: ConnectionKind = kind) -> Array:
            q = s(v)
            g_q = m.metric(q)
            j_q = s.tangents(v, scheme)
            t_q = np.array(_tangent_frame(g_q, j_q))
            amb = _ambient_second_derivatives(
                m, kind, q, j_q, s.second_derivatives(v, scheme), scheme,
            )
            return np.array([
                [_normal_part(amb[a, b], t_q, g_q) for b in range(2)] for a in range(2)
            ])

        n = normal_parts(u)
        dn = gradient(normal_parts, u, scheme.outer())  # [x, a, b, k]
        gamma = m.connection(kind, scheme)(p)
        gamma_ind = induced_christoffel(m, s, u, kind, scheme)
        r_amb = connection_curvature(m, kind, p, scheme)

        def nabla_perp(x: int, a: int, b: int) -> Vector:
            ambient = dn[x, a, b] + np.einsum("kij,i,j->k", gamma, jac[x], n[a, b])
            return _normal_part(ambient, tangent, metric)

        def covariant_h(x: int, y: int, z: int) -> Vector:
            # (∇_X h)(Y, Z) on coordinate fields
            return (
                nabla_perp(x, y, z)
                - np.einsum("d,dk->k", gamma_ind[:, x, y], n[:, z])
                - np.einsum("d,dk->k", gamma_ind[:, x, z], n[y, :])
            )

        worst = 0.0
        for z in range(2):
            lhs = _normal_part(r_amb.apply(jac[0], jac[1], jac[z]), tangent, metric)
            diff = lhs - (covariant_h(0, 1, z) - covariant_h(1, 0, z))
            worst = max(worst, float(np.sqrt(max(diff @ metric @ diff, 0.0))))
        out.append(worst)
    return out[0], out[1]


def normal_curvature_tensor(
    m: StatisticalManifold,
    s: SurfaceImmersion,
    u: Vector,
    scheme: FdScheme | None = None,
    *,
    frame: AdaptedFrame | None = None,
) -> tuple[float, float]:
    """(g(R⊥(e1, e2)e3, e4), g(R*⊥(e1, e2)e3, e4)) from the Ricci equations."""
    if m.dim != 4:
        raise WrongCodimension(f"normal curvature needs a 4-dimensional ambient, got {m.dim}")
    scheme = scheme or m.scheme
    u = as_vector(u)
    forms = fundamental_forms(m, s, u, scheme, frame=frame)
    p = s(u)
    metric = m.metric(p)
    e1, e2, e3, e4 = forms.frame.vectors
    a3, a4 = forms.h
    a3s, a4s = forms.h_star
    commutator = a3s @ a4 - a4 @ a3s
    commutator_star = a3 @ a4s - a4s @ a3
    r = connection_curvature(m, ConnectionKind.PRIMAL, p, scheme)
    r_star = connection_curvature(m, ConnectionKind.DUAL, p, scheme)
    return (
        r.value(metric, e1, e2, e3, e4) + float(commutator[1, 0]),
        r_star.value(metric, e1, e2, e3, e4) + float(commutator_star[1, 0]),
    )


def normal_curvature_oracle(
    m: StatisticalManifold,
    s: SurfaceImmersion,
    u: Vector,
    scheme: FdScheme | None = None,
    *,
    frame: AdaptedFrame | None = None,
) -> tuple[float, float]:
    """Same pair as ``normal_curvature_tensor``, by differencing the normal connections."""
    if m.dim != 4:
        raise WrongCodimension(f"normal curvature needs a 4-dimensional ambient, got {m.dim}")
    scheme = scheme or m.scheme
    outer = scheme.outer()
    u = as_vector(u)
    base = frame or frames(m, s, u, scheme)

    def frame_vectors(v: Vector) -> Array:
        return frames(m, s, v, scheme, seeds=base.seeds, flip=base.flipped).vectors

    def connection_matrices(v: Vector, kind: ConnectionKind) -> Array:
        # w[a, β, α] = g̃(∇̃_{∂_a f} e_α, e_β) over normal indices
        vectors = frame_vectors(v)
        d_vectors = gradient(frame_vectors, v, outer)
        q = s(v)
        g_q = m.metric(q)
        gamma = m.connection(kind, scheme)(q)
        jac = s.tangents(v, scheme)
        normals = vectors[2:]
        along = d_vectors[:, 2:, :] + np.einsum("kij,ai,bj->abk", gamma, jac, normals)
        return np.einsum("abk,kl,cl->acb", along, g_q, normals)

    det = float(np.linalg.det(base.tangent_coefficients))
    out = []
    for kind in (ConnectionKind.PRIMAL, ConnectionKind.DUAL):
        field = partial(connection_matrices, kind=kind)
        w = field(u)
        dw = gradient(field, u, outer)  # [x, a, β, α]
        omega = dw[0, 1] - dw[1, 0] + w[0] @ w[1] - w[1] @ w[0]
        out.append(float(omega[1, 0]) * det)
    return out[0], out[1]
