"""Tests for Lamé curves and their rotation numbers."""

import numpy as np
import pytest

from src import lame
from src.curves import infinitesimal_angles
from src.errors import ParameterError


class TestParameters:
    """Tests for the discrete data and the spectral parameter."""

    @pytest.mark.parametrize(
        "k,n,m", [(4, 2, 0), (5, 5, 0), (9, 3, 0), (5, 1, -1), (1, 1, 0), (5, 0, 0)]
    )
    def test_invalid_triples(self, k, n, m):
        """Test inadmissible (k, n, m) raise ParameterError."""
        with pytest.raises(ParameterError):
            lame.validate_triple(k, n, m)

    def test_quantization_is_met(self):
        """Test aζ(ω) − ωζ(a) hits iπ(n/2k + m)."""
        params = lame.solve_a(5, 3, 0)
        assert abs(params.quantization() - 1j * params.target) < 1e-10
        assert params.a.real == pytest.approx(params.omega)

    def test_nonzero_m_lies_on_imaginary_axis(self):
        """Test m ≥ 1 solves on the segment (0, ω′)."""
        params = lame.solve_a(3, 1, 1)
        assert params.a.real == 0.0
        assert 0.0 < params.a.imag < params.omega_prime_im

    def test_degenerate_limit(self):
        """Test Im a approaches (2ω/π)·artanh(n/k) for a long imaginary period."""
        params = lame.solve_a(3, 1, 0, 8.0)
        assert params.a.imag == pytest.approx(lame.degenerate_b(3, 1), abs=1e-6)


class TestBuildCurve:
    """Tests for the sampled Lamé curve."""

    def test_k3_curve(self, lame_k3):
        """Test the (3, 1, 0) curve closes with winding number 1."""
        assert lame_k3.winding == 1
        assert lame_k3.closure_residual < 1e-8
        assert lame_k3.quasi_periodicity_residual < 1e-8
        assert lame_k3.curve.wronskian_residual() < 1e-8

    def test_winding_of_n3(self):
        """Test (5, 3, 0) winds three times."""
        curve = lame.build_curve(lame.solve_a(5, 3, 0), 512)
        assert curve.winding == 3

    def test_winding_with_m(self):
        """Test (3, 1, 1) winds 2k + n times."""
        curve = lame.build_curve(lame.solve_a(3, 1, 1), 512)
        assert curve.winding == 7


class TestAngles:
    """Tests for certified self-Bäcklund angles."""

    def test_k3_has_right_angle(self, lame_k3):
        """Test the single rotation number of (3, 1, 0) is π/2."""
        angles = lame.self_backlund_angles(lame_k3.params, lame_k3)
        assert len(angles) == 1
        assert angles[0].alpha == pytest.approx(np.pi / 2, abs=1e-9)
        assert angles[0].residual < 1e-7

    def test_k5_has_three_angles(self):
        """Test (5, 1, 0) has k − 2 rotation numbers."""
        params = lame.solve_a(5, 1, 0)
        angles = lame.self_backlund_angles(params, lame.build_curve(params, 512))
        assert len(angles) == 3
        alphas = [angle.alpha for angle in angles]
        assert alphas == sorted(alphas)
        assert alphas[1] == pytest.approx(np.pi / 2, abs=1e-9)

    def test_k7_has_five_symmetric_angles(self):
        """Test (7, 1, 0) has five rotation numbers closed under α ↦ π − α."""
        params = lame.solve_a(7, 1, 0)
        angles = lame.self_backlund_angles(params, lame.build_curve(params, 1024))
        alphas = np.array([angle.alpha for angle in angles])
        assert len(alphas) == 5
        assert np.allclose(np.sort(alphas), np.sort(np.pi - alphas), atol=1e-8)
        assert min(abs(alphas - np.pi / 2)) < 1e-9
        assert all(abs(angle.c) > lame.CHORD_FLOOR for angle in angles)

    def test_nonzero_m_angles(self):
        """Test (3, 1, 1) has certified rotation numbers near 0.7108, π/2 and 2.4308."""
        params = lame.solve_a(3, 1, 1)
        angles = lame.self_backlund_angles(params, lame.build_curve(params, 1024))
        alphas = sorted(angle.alpha for angle in angles)
        assert alphas == pytest.approx([0.7108, np.pi / 2, 2.4308], abs=1e-3)
        assert all(angle.residual < lame.CERTIFICATE_TOLERANCE for angle in angles)

    def test_no_roots_next_to_pi(self):
        """Test (4, 1, 1) reports only certified angles away from α = π."""
        params = lame.solve_a(4, 1, 1)
        angles = lame.self_backlund_angles(params, lame.build_curve(params, 1024))
        alphas = np.array([angle.alpha for angle in angles])
        assert len(alphas) > 0
        assert np.all(alphas < np.pi - 1e-3)
        assert np.allclose(np.sort(alphas), np.sort(np.pi - alphas), atol=1e-8)
        assert all(1 <= angle.level <= params.k - params.n - 1 for angle in angles)

    def test_reduced_phase_is_multiple_of_pi(self, lame_k3):
        """Test Φ(α) ∈ πZ at every certified angle."""
        for angle in lame.self_backlund_angles(lame_k3.params, lame_k3):
            phase = lame.reduced_phase(lame_k3.params, angle.alpha)[0]
            assert phase == pytest.approx(angle.level * np.pi, abs=1e-9)


class TestDeformation:
    """Tests for the nome deformation towards the circle."""

    def test_limits_solve_infinitesimal_equation(self):
        """Test k = 4 rotation numbers extrapolate to roots of tan 4α = 4 tan α."""
        family = lame.deformation_family(4, [0.5, 0.25], size=256)
        assert len(family.steps) == 2
        assert family.limits == pytest.approx(infinitesimal_angles(4), abs=1e-4)
        assert family.steps[-1].nome < family.steps[0].nome

    @pytest.mark.parametrize("k", [3, 4, 5])
    def test_full_grid(self, k):
        """Test the rotation numbers follow s from 1 down to 0.05 without jumps."""
        grid = [1.0, 0.5, 0.25, 0.1, 0.05]
        family = lame.deformation_family(k, grid, size=256)
        assert [step.s for step in family.steps] == grid
        assert all(len(step.angles) == k - 2 for step in family.steps)
        assert family.limits == pytest.approx(infinitesimal_angles(k), abs=1e-4)

    def test_rejects_small_k(self):
        """Test k < 3 raises ParameterError."""
        with pytest.raises(ParameterError):
            lame.deformation_family(2, [0.5, 0.25])

    def test_rejects_increasing_grid(self):
        """Test s must decrease along the grid."""
        with pytest.raises(ParameterError):
            lame.deformation_family(4, [0.25, 0.5])
