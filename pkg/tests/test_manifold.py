"""Tests for statistical manifolds, connections and curvature."""

import itertools

import numpy as np
import pytest

from statkit.fixtures.catalogue import FixtureSpec, build_manifold
from statkit.geometry.manifold import (
    ConnectionKind,
    CurvatureTensor,
    classical_sectional_curvature,
    connection_curvature,
    constant_curvature_residual,
    curvature_duality_residual,
    duality_residual,
    pair_symmetry_residual,
)
from statkit.geometry.numerics import ChartBoundary, FdScheme, as_vector, basis_vector


@pytest.fixture()
def h3():
    return build_manifold(FixtureSpec(name="h3-hessian"))


@pytest.fixture()
def potential_r4():
    return build_manifold(FixtureSpec(name="hessian-potential-r4"))


def _lattice(lower, upper, n=3):
    axes = [np.linspace(lo, hi, n) for lo, hi in zip(lower, upper, strict=True)]
    return [as_vector(p) for p in itertools.product(*axes)]


class TestUpperHalfSpaceConnections:
    def test_primal_coefficients(self, h3):
        gamma = h3.primal(as_vector((0.0, 0.0, 1.0)))
        assert gamma[2, 0, 0] == 2.0
        assert gamma[2, 1, 1] == 2.0
        assert gamma[2, 2, 2] == 1.0
        assert gamma[0, 0, 2] == 0.0

    def test_levi_civita_coefficients(self, h3):
        lc = h3.levi_civita(as_vector((0.0, 0.0, 1.0)))
        assert lc[2, 0, 0] == pytest.approx(1.0, abs=1e-7)
        assert lc[0, 0, 2] == pytest.approx(-1.0, abs=1e-7)
        assert lc[2, 2, 2] == pytest.approx(-1.0, abs=1e-7)

    def test_dual_coefficients(self, h3):
        dual = h3.dual(as_vector((0.0, 0.0, 1.0)))
        assert dual[2, 0, 0] == pytest.approx(0.0, abs=1e-7)
        assert dual[0, 0, 2] == pytest.approx(-2.0, abs=1e-7)
        assert dual[2, 2, 2] == pytest.approx(-3.0, abs=1e-7)

    def test_connection_selector(self, h3):
        p = as_vector((0.1, 0.2, 1.3))
        assert np.array_equal(h3.connection(ConnectionKind.PRIMAL)(p), h3.primal(p))
        assert np.allclose(h3.connection(ConnectionKind.DUAL)(p), h3.dual(p))
        assert np.allclose(h3.connection(ConnectionKind.LEVI_CIVITA)(p), h3.levi_civita(p))

    def test_outside_chart_raises(self, h3):
        with pytest.raises(ChartBoundary):
            h3.metric(as_vector((0.0, 0.0, -1.0)))


class TestCurvature:
    def test_primal_is_flat(self, h3):
        points = _lattice((-1, -1, 1), (1, 1, 2))
        assert constant_curvature_residual(h3, 0.0, points) <= 1e-6

    def test_wrong_claim_is_detected(self, h3):
        points = _lattice((-1, -1, 1), (1, 1, 2))
        assert constant_curvature_residual(h3, 1.0, points) > 0.1

    def test_levi_civita_sectional_curvature_is_minus_one(self, h3):
        for p in _lattice((-1, -1, 1), (1, 1, 2)):
            r0 = connection_curvature(h3, ConnectionKind.LEVI_CIVITA, p, h3.scheme)
            g = h3.metric(p)
            for i, j in ((0, 1), (0, 2), (1, 2)):
                k = classical_sectional_curvature(r0, g, basis_vector(3, i), basis_vector(3, j))
                assert k == pytest.approx(-1.0, abs=1e-5)

    def test_antisymmetric_in_last_pair(self, potential_r4):
        p = as_vector((0.1, -0.2, 0.3, 0.0))
        r = connection_curvature(potential_r4, ConnectionKind.LEVI_CIVITA, p, FdScheme())
        assert np.allclose(r.components, -r.components.transpose(0, 1, 3, 2))

    def test_pair_symmetry_of_levi_civita(self, h3):
        assert pair_symmetry_residual(h3, as_vector((0.2, -0.4, 1.4))) <= 1e-6

    def test_curvature_duality(self, h3, potential_r4):
        assert curvature_duality_residual(h3, as_vector((0.5, 0.5, 1.5))) <= 1e-6
        assert curvature_duality_residual(potential_r4, as_vector((0.1, 0.2, 0.0, -0.3))) <= 1e-6

    def test_convergence_order(self, h3):
        p = [as_vector((0.3, -0.2, 1.2))]
        coarse = constant_curvature_residual(h3, 0.0, p, FdScheme(step=2e-4))
        fine = constant_curvature_residual(h3, 0.0, p, FdScheme(step=1e-4))
        assert coarse / fine >= 3.5

    def test_apply_and_value(self):
        components = np.zeros((2, 2, 2, 2))
        components[0, 1, 0, 1] = 1.0
        components[0, 1, 1, 0] = -1.0
        r = CurvatureTensor(components=components)
        e0, e1 = basis_vector(2, 0), basis_vector(2, 1)
        assert np.array_equal(r.apply(e0, e1, e1), e0)
        assert r.value(np.eye(2), e0, e1, e1, e0) == 1.0
        assert r.dim == 2


class TestDuality:
    def test_dual_connection_satisfies_duality(self, h3, potential_r4):
        p3 = as_vector((0.3, 0.1, 1.1))
        assert duality_residual(h3, h3.connection(ConnectionKind.DUAL), p3, FdScheme()) <= 1e-6
        p4 = as_vector((0.1, 0.2, -0.1, 0.0))
        dual4 = potential_r4.connection(ConnectionKind.DUAL)
        assert duality_residual(potential_r4, dual4, p4, FdScheme()) <= 1e-6

    def test_primal_is_not_its_own_dual(self, h3):
        p = as_vector((0.0, 0.0, 1.0))
        assert duality_residual(h3, h3.primal, p, FdScheme()) > 0.1

    def test_swapped_twice_restores_primal(self, h3):
        p = as_vector((0.2, 0.1, 1.4))
        swapped = h3.swapped()
        assert np.allclose(swapped.primal(p), h3.dual(p))
        assert np.allclose(swapped.dual(p), h3.primal(p), atol=1e-6)

    def test_dual_of_hessian_structure_is_flat(self, potential_r4):
        points = _lattice((-0.5,) * 4, (0.5,) * 4, n=2)
        assert constant_curvature_residual(potential_r4.swapped(), 0.0, points) <= 1e-6
