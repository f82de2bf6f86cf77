"""Dense small-dimension linear algebra and central finite differences.

Everything here is pure: no module state, arrays in, arrays out.
Christoffel data is stored as ``arr[k, i, j] = Γ^k_ij``.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from typing import Literal

import numpy as np
import numpy.typing as npt
import scipy.linalg
from pydantic import BaseModel, ConfigDict, Field

Vector = npt.NDArray[np.float64]
Matrix = npt.NDArray[np.float64]
Array3 = npt.NDArray[np.float64]

# Gram-Schmidt rank-deficiency threshold (absolute g-norm)
DEGENERATE_NORM = 1e-10


class GeometryError(Exception):
    """Base error for geometric computations."""


class DegenerateInput(GeometryError):
    """Inputs are rank deficient (vanishing norm or area)."""


class ChartBoundary(GeometryError):
    """An evaluation point left the declared chart domain."""


class NotSPD(GeometryError):
    """A matrix used as a metric is not symmetric positive definite."""


class FdScheme(BaseModel):
    """Central-difference parameters.

    ``step`` differentiates closed-form fields; ``second_step`` is used for
    nested second differences of surface maps, whose rounding error grows
    like eps/h²; ``outer_step`` differentiates fields that already carry
    finite-difference noise.
    """

    model_config = ConfigDict(frozen=True)

    step: float = Field(1e-4, gt=0)
    second_step: float = Field(1e-4, gt=0)
    outer_step: float = Field(1e-3, gt=0)
    order: Literal[2] = 2

    def outer(self) -> FdScheme:
        """Scheme whose primary step is the outer step."""
        return self.model_copy(update={"step": self.outer_step})

    def halved(self) -> FdScheme:
        return FdScheme(
            step=self.step / 2,
            second_step=self.second_step / 2,
            outer_step=self.outer_step / 2,
        )


def as_vector(values: Sequence[float] | Vector) -> Vector:
    return np.asarray(values, dtype=np.float64)


def basis_vector(n: int, index: int) -> Vector:
    e = np.zeros(n)
    e[index] = 1.0
    return e


def inner(metric: Matrix, x: Vector, y: Vector) -> float:
    """g(x, y)."""
    return float(x @ metric @ y)


def gram_schmidt(vectors: Sequence[Vector], metric: Matrix) -> list[Vector]:
    """Orthonormalize ``vectors`` in order with respect to ``metric``.

    Each output is a positive multiple of its input minus its projection on
    the previous outputs, so the first output is a positive multiple of the
    first input.
    """
    out: list[Vector] = []
    for v in vectors:
        w = np.array(v, dtype=np.float64)
        for e in out:
            w = w - inner(metric, w, e) * e
        norm_sq = inner(metric, w, w)
        if norm_sq < DEGENERATE_NORM**2:
            raise DegenerateInput(
                f"vector {len(out)} has g-norm {np.sqrt(max(norm_sq, 0.0)):.3e} "
                "after projection (rank deficient input)"
            )
        out.append(w / np.sqrt(norm_sq))
    return out


def central_diff(
    f: Callable[[Vector], npt.ArrayLike],
    point: Vector,
    direction_index: int,
    scheme: FdScheme,
    *,
    step: float | None = None,
    domain: Callable[[Vector], bool] | None = None,
) -> npt.NDArray[np.float64]:
    """(f(p + h e) - f(p - h e)) / 2h along coordinate ``direction_index``."""
    h = scheme.step if step is None else step
    e = basis_vector(len(point), direction_index) * h
    forward, backward = point + e, point - e
    if domain is not None:
        for q in (forward, backward):
            if not domain(q):
                raise ChartBoundary(f"stencil point {q.tolist()} outside chart domain")
    return (np.asarray(f(forward), dtype=np.float64)
            - np.asarray(f(backward), dtype=np.float64)) / (2.0 * h)


def gradient(
    f: Callable[[Vector], npt.ArrayLike],
    point: Vector,
    scheme: FdScheme,
    *,
    step: float | None = None,
    domain: Callable[[Vector], bool] | None = None,
) -> npt.NDArray[np.float64]:
    """Stack of central differences; leading axis is the direction."""
    return np.stack([
        central_diff(f, point, i, scheme, step=step, domain=domain)
        for i in range(len(point))
    ])


def invert_spd(metric: Matrix) -> Matrix:
    """Inverse of a symmetric positive definite matrix via Cholesky."""
    m = np.asarray(metric, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NotSPD(f"expected a square matrix, got shape {m.shape}")
    scale = max(float(np.max(np.abs(m))), 1.0)
    if not np.allclose(m, m.T, rtol=0.0, atol=1e-12 * scale):
        raise NotSPD("matrix is not symmetric")
    try:
        factor = scipy.linalg.cho_factor(m, lower=True, check_finite=True)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise NotSPD(f"Cholesky decomposition failed: {e}") from e
    inverse = scipy.linalg.cho_solve(factor, np.eye(m.shape[0]))
    return 0.5 * (inverse + inverse.T)


def is_spd(metric: Matrix) -> bool:
    try:
        invert_spd(metric)
    except NotSPD:
        return False
    return True


def lower_symmetry_defect(christoffel: Array3) -> float:
    """max |Γ^k_ij - Γ^k_ji|; zero for torsion-free data."""
    return float(np.max(np.abs(christoffel - christoffel.transpose(0, 2, 1)), initial=0.0))
