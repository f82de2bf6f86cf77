"""Seeded random graph surfaces over a validated fixture family."""

from __future__ import annotations

import logging
from collections.abc import Iterator
from dataclasses import dataclass

import numpy as np

from statkit.config import DEFAULT_TOLERANCE
from statkit.fixtures.catalogue import (
    MONOMIALS,
    FixtureSpec,
    build_fixture,
    graph_surface,
    manifold_entry,
)
from statkit.geometry.immersion import ParameterBox, SurfaceImmersion
from statkit.geometry.manifold import StatisticalManifold
from statkit.geometry.numerics import FdScheme, Vector

logger = logging.getLogger(__name__)

COEFFICIENT_BOUND = 0.3
SCAN_DOMAIN = ParameterBox(lower=(-0.5, -0.5), upper=(0.5, 0.5))
# Sample points stay this far inside the scan domain
INTERIOR_BOUND = 0.45


@dataclass(frozen=True)
class ScanSample:
    index: int
    manifold: StatisticalManifold
    surface: SurfaceImmersion
    point: Vector
    coefficients: np.ndarray


def random_scan(
    seed: int,
    count: int,
    family: str,
    scheme: FdScheme | None = None,
    *,
    tolerance: float = DEFAULT_TOLERANCE,
) -> Iterator[ScanSample]:
    """Yield ``count`` graph surfaces with one interior sample point each.

    The family is validated once up front (``ValidationFailed`` propagates).
    Coefficients and points are drawn from ``np.random.default_rng(seed)``,
    so the stream is identical for identical arguments.
    """
    scheme = scheme or FdScheme()
    m, _ = build_fixture(FixtureSpec(name=family), scheme, tolerance=tolerance)
    base = manifold_entry(family)["scan_base"]
    rng = np.random.default_rng(seed)
    shape = (m.dim - 2, len(MONOMIALS))
    logger.info("scanning %d graph surfaces in %s (seed %d)", count, family, seed)
    for index in range(count):
        coefficients = rng.uniform(-COEFFICIENT_BOUND, COEFFICIENT_BOUND, size=shape)
        point = rng.uniform(-INTERIOR_BOUND, INTERIOR_BOUND, size=2)
        yield ScanSample(
            index=index,
            manifold=m,
            surface=graph_surface(base, coefficients, SCAN_DOMAIN),
            point=point,
            coefficients=coefficients,
        )
