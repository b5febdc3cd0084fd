"""Tests for dual curves in the hyperbolic plane."""

import numpy as np
import pytest

from src import hyperbolic, lame
from src.curves import CentroaffineCurve
from src.errors import DegeneracyError, DomainError


def _hyperbola_arc() -> CentroaffineCurve:
    t = np.linspace(-0.5, 0.5, 2001)
    return CentroaffineCurve(
        samples=np.column_stack([np.cosh(t), np.sinh(t)]),
        closed=False,
        t0=-0.5,
        dt=float(t[1] - t[0]),
        velocity=np.column_stack([np.sinh(t), np.cosh(t)]),
        curvature=np.ones_like(t),
    )


class TestContactConics:
    """Tests for the conics tangent to a contact element."""

    def test_unit_and_orthogonal(self, rng):
        """Test the ellipse is timelike, the hyperbola spacelike and both orthogonal."""
        for _ in range(10):
            point, direction = rng.normal(size=(2, 2))
            ellipse, hyperbola = hyperbolic.contact_conics(point, direction)
            assert hyperbolic.minkowski(ellipse, ellipse) == pytest.approx(-1.0)
            assert hyperbolic.minkowski(hyperbola, hyperbola) == pytest.approx(1.0)
            assert abs(hyperbolic.minkowski(ellipse, hyperbola)) < 1e-10

    def test_line_through_origin(self):
        """Test a radial contact element raises DegeneracyError."""
        with pytest.raises(DegeneracyError):
            hyperbolic.contact_conics(np.array([1.0, 1.0]), np.array([2.0, 2.0]))

    def test_disk_coordinates(self, rng):
        """Test pseudo-sphere points land inside the unit disk."""
        points = rng.normal(size=(50, 2))
        directions = rng.normal(size=(50, 2))
        ellipses = np.array([hyperbolic.contact_conics(p, d)[0]
                             for p, d in zip(points, directions, strict=True)])
        assert np.all(np.linalg.norm(hyperbolic.to_disk(ellipses), axis=1) < 1.0)


class TestDualCurve:
    """Tests for the osculating-ellipse dual."""

    def test_circle(self, unit_circle):
        """Test the circle's dual is the point (1, 0, 1)."""
        dual = hyperbolic.dual_curve(unit_circle)
        assert np.allclose(dual.samples, [1.0, 0.0, 1.0])
        assert np.all(dual.cusp_mask)
        assert np.all(np.isnan(dual.kappa))
        assert dual.curvature_relation_residual() == 0.0
        assert np.allclose(dual.disk(), 0.0)

    def test_hyperbola_is_a_geodesic(self):
        """Test p = 1 gives speed 2 and κ = 0."""
        dual = hyperbolic.dual_curve(_hyperbola_arc())
        t = dual.t
        expected = np.column_stack([np.cosh(2 * t), -np.sinh(2 * t), np.cosh(2 * t)])
        assert np.allclose(dual.samples, expected)
        assert np.max(np.abs(dual.speed - 2.0)) < 1e-4
        assert np.max(np.abs(dual.kappa)) < 1e-4
        assert dual.curvature_relation_residual() < 1e-3

    def test_curvature_relation_on_lame_curve(self, lame_k3):
        """Test (1 + p)(1 + κ) = 2 away from the cusps."""
        dual = hyperbolic.dual_curve(lame_k3.curve)
        assert dual.curvature_relation_residual() < 1e-6

    @pytest.mark.parametrize("size", [512, 1024])
    def test_curvature_relation_on_fine_grids(self, lame_k3, size):
        """Test refining the grid keeps (1 + p)(1 + κ) = 2 next to the cusps."""
        curve = lame.build_curve(lame_k3.params, size)
        dual = hyperbolic.dual_curve(curve.curve)
        assert dual.curvature_relation_residual() < 1e-6
        near = ~dual.cusp_mask & (np.abs(1.0 + dual.potential) < 1e-2)
        if np.any(near):
            relation = (1.0 + dual.potential[near]) * (1.0 + dual.kappa[near])
            assert np.max(np.abs(relation - 2.0)) < 1e-6

    def test_speed_matches_potential(self, ellipse_like):
        """Test the dual speed is |1 + p|."""
        dual = hyperbolic.dual_curve(ellipse_like)
        assert np.max(np.abs(dual.speed**2 - (1.0 + dual.potential) ** 2)) < 1e-8


class TestCusps:
    """Tests for counting cusps of the dual."""

    def test_at_least_four(self, ellipse_like, lame_k3):
        """Test non-conic closed curves have at least four cusps per half period."""
        for curve in (ellipse_like, lame_k3.curve):
            count = hyperbolic.cusp_count(hyperbolic.dual_curve(curve))
            assert count >= 4
            assert count % 2 == 0

    def test_conic_raises(self, unit_circle):
        """Test conics have no cusps to count."""
        with pytest.raises(DomainError):
            hyperbolic.cusp_count(hyperbolic.dual_curve(unit_circle))
