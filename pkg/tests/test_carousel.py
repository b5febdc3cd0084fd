"""Tests for the ξ field on centroaffine polygons and the decagon carousels."""

import numpy as np
import pytest

from src import carousel
from src.carousel import GOLDEN
from src.curves import bracket
from src.errors import (
    AdmissibilityError,
    BracketError,
    ConstraintError,
    DomainError,
    MonodromyError,
    UnsupportedError,
)
from src.polygons import regular_polygon


@pytest.fixture
def decagon():
    """A decagon off the regular orbit."""
    return carousel.perturbed_polygon(5, 0.05, seed=3)


def _tangent(polygon, rng):
    return carousel.tangent_projection(polygon, rng.standard_normal((polygon.n, 2)))


def _apply(form: np.ndarray, w: np.ndarray) -> float:
    return float(np.sum(form * w))


class TestFrieze:
    """Tests for the n = 5 frieze coordinates and Hamiltonian."""

    def test_golden_point_is_minimum(self):
        """Test H(φ, φ) = 5φ with zero gradient."""
        assert carousel.frieze5_hamiltonian(GOLDEN, GOLDEN) == pytest.approx(5.0 * GOLDEN)
        hx, hy = carousel.frieze5_gradient(GOLDEN, GOLDEN)
        assert abs(hx) < 1e-12 and abs(hy) < 1e-12
        for dx, dy in [(0.1, 0.0), (0.0, -0.1), (0.05, 0.05)]:
            assert carousel.frieze5_hamiltonian(GOLDEN + dx, GOLDEN + dy) > 5.0 * GOLDEN

    def test_symmetry(self):
        """Test H(x, y) = H(y, x)."""
        assert carousel.frieze5_hamiltonian(1.3, 2.1) == pytest.approx(
            carousel.frieze5_hamiltonian(2.1, 1.3)
        )

    def test_non_positive_rejected(self):
        """Test the frieze functions need positive coordinates."""
        with pytest.raises(DomainError):
            carousel.frieze5_hamiltonian(0.0, 1.0)
        with pytest.raises(DomainError):
            carousel.frieze5_coefficients(1.0, -1.0)

    def test_regular_decagon(self):
        """Test the golden frieze point is the regular decagon."""
        assert np.allclose(carousel.frieze5_coefficients(GOLDEN, GOLDEN), GOLDEN)
        assert carousel.decagon_from_frieze(GOLDEN, GOLDEN).is_regular()

    def test_coordinates_round_trip(self):
        """Test frieze_coordinates recovers (x, y)."""
        polygon = carousel.decagon_from_frieze(1.3, 1.7)
        assert carousel.frieze_coordinates(polygon) == pytest.approx((1.3, 1.7))

    def test_reduced_field_follows_level_curves(self):
        """Test the pushed-forward field is parallel to the Hamiltonian field of H."""
        x, y = 1.4, 1.9
        field = carousel.reduced_field(carousel.frieze5_coefficients(x, y))
        fx, fy = carousel.frieze5_field(x, y)
        assert abs(field[1] * fy - field[4] * fx) < 1e-10 * (1.0 + np.hypot(fx, fy))


class TestVelocity:
    """Tests for the ξ field."""

    def test_regular_coefficients(self):
        """Test v_i = a/2 on the regular polygon."""
        a = 2.0 * np.cos(np.pi / 7)
        assert np.allclose(carousel.velocity_coefficients(np.full(7, a)), a / 2.0)

    def test_even_admissible(self):
        """Test even n with vanishing alternating sum solves v_i + v_{i+1} = a_i."""
        a = np.array([1.0, 2.0, 1.5, 0.5])
        v = carousel.velocity_coefficients(a)
        assert np.allclose(v + np.roll(v, -1), a)

    def test_even_inadmissible(self):
        """Test a non-zero alternating sum raises AdmissibilityError."""
        with pytest.raises(AdmissibilityError):
            carousel.velocity_coefficients(np.array([1.0, 2.0, 1.0, 1.0]))

    def test_field_equations(self, decagon):
        """Test [P_i, V_i] = 1 and the side determinants stay fixed."""
        velocity = carousel.xi(decagon)
        assert carousel.field_residual(decagon, velocity) < 1e-10
        assert np.allclose(velocity[5:], -velocity[:5])

    def test_reduced_field_is_pushforward(self, decagon):
        """Test ȧ_i = [V_{i−1}, P_{i+1}] + [P_{i−1}, V_{i+1}] matches the dressing chain."""
        p, v = decagon.vertices, carousel.xi(decagon)
        direct = (bracket(np.roll(v, 1, axis=0), np.roll(p, -1, axis=0))
                  + bracket(np.roll(p, 1, axis=0), np.roll(v, -1, axis=0)))[:5]
        assert np.max(np.abs(direct - carousel.reduced_field(decagon.hill_coeffs))) < 1e-9

    def test_hamiltonian_is_conserved_by_reduced_field(self, decagon):
        """Test Σ ȧ_i = 0."""
        assert abs(np.sum(carousel.reduced_field(decagon.hill_coeffs))) < 1e-12


class TestPresymplectic:
    """Tests for the two-form on the constraint manifold."""

    def test_antisymmetry(self, decagon, rng):
        """Test ω(u, u) = 0 and ω(u, w) = −ω(w, u)."""
        u, w = _tangent(decagon, rng), _tangent(decagon, rng)
        assert abs(carousel.presymplectic(decagon, u, u)) < 1e-12
        assert carousel.presymplectic(decagon, u, w) == pytest.approx(
            -carousel.presymplectic(decagon, w, u)
        )

    def test_xi_in_kernel(self, decagon, rng):
        """Test ω(ξ, w) vanishes on random tangent vectors."""
        velocity = carousel.xi(decagon)[:5]
        for _ in range(20):
            assert abs(carousel.presymplectic(decagon, velocity, _tangent(decagon, rng))) < 1e-10

    def test_generators_are_hamiltonian(self, decagon, rng):
        """Test i_e ω = −dI, i_h ω = dJ and i_f ω = dK."""
        fields = carousel.generators(decagon)
        forms = carousel.differentials(decagon)
        for _ in range(5):
            w = _tangent(decagon, rng)
            e = carousel.presymplectic(decagon, fields["e"], w)
            h = carousel.presymplectic(decagon, fields["h"], w)
            f = carousel.presymplectic(decagon, fields["f"], w)
            assert abs(e + _apply(forms["I"], w)) < 1e-10
            assert abs(h - _apply(forms["J"], w)) < 1e-10
            assert abs(f - _apply(forms["K"], w)) < 1e-10

    def test_xi_and_nu(self, decagon):
        """Test ω(ξ, ν) = 0."""
        velocity = carousel.xi(decagon)[:5]
        nu = carousel.generators(decagon)["nu"]
        assert abs(carousel.presymplectic(decagon, velocity, nu)) < 1e-10

    def test_non_tangent_vector_rejected(self, decagon, rng):
        """Test vectors off the constraint tangent space raise ConstraintError."""
        with pytest.raises(ConstraintError):
            carousel.presymplectic(decagon, rng.standard_normal((5, 2)), _tangent(decagon, rng))


class TestFlow:
    """Tests for integrating ξ."""

    def test_integrals_conserved(self, decagon):
        """Test I, J, K and H stay constant along the flow."""
        trajectory = carousel.flow(carousel.CarouselState.at(decagon), 2.0, tol=1e-9,
                                   samples=20)
        series = trajectory.integral_series()
        assert np.max(np.abs(series - series[0])) < 1e-8
        casimirs = [state.casimir for state in trajectory.states]
        assert np.ptp(casimirs) < 1e-8
        assert trajectory.times[-1] == pytest.approx(2.0)
        assert trajectory.vertex_series().shape == (21, 5, 2)

    def test_regular_decagon_rotates_rigidly(self):
        """Test the regular decagon keeps its Hill coefficients."""
        state = carousel.CarouselState.at(regular_polygon(5))
        trajectory = carousel.flow(state, 1.0, samples=5)
        assert trajectory.states[-1].polygon.is_regular(1e-8)

    def test_even_n_unsupported(self):
        """Test flows are integrated for odd n only."""
        with pytest.raises(UnsupportedError):
            carousel.flow(carousel.CarouselState.at(regular_polygon(4)), 1.0)

    def test_radius_bound(self, decagon):
        """Test vertex radii stay inside the compactness bound."""
        trajectory = carousel.flow(carousel.CarouselState.at(decagon), 1.0, samples=10)
        bound = carousel.radius_bound(trajectory)
        assert 1.0 / bound.bound <= bound.min_radius <= bound.max_radius <= bound.bound


class TestMonodromy:
    """Tests for the decagon monodromy."""

    def test_regular_decagon(self):
        """Test the regular decagon's monodromy is the rotation by −π/5."""
        result = carousel.monodromy(regular_polygon(5))
        assert result.angle == pytest.approx(-np.pi / 5, abs=1e-10)
        assert result.shift_time == 0.0
        assert result.section["regular"]

    def test_perturbed_decagon_is_elliptic(self, decagon):
        """Test A ∈ SL₂ is elliptic and commutes with ν."""
        result = carousel.monodromy(decagon)
        assert np.linalg.det(result.matrix) == pytest.approx(1.0, abs=1e-10)
        assert abs(result.trace) < 2.0
        assert result.generator_residual < 1e-6
        assert 0.0 < result.shift_time < result.reduced_period

    def test_rotation_angle_rejects_hyperbolic(self):
        """Test a hyperbolic matrix has no rotation angle."""
        with pytest.raises(MonodromyError):
            carousel.rotation_angle(np.array([[2.0, 0.0], [0.0, 0.5]]))

    def test_decagons_only(self):
        """Test monodromy is computed for n = 5."""
        with pytest.raises(UnsupportedError):
            carousel.monodromy(regular_polygon(7))

    def test_close_carousel(self):
        """Test a scanned level with zero monodromy angle closes into a self-Bäcklund curve."""
        try:
            result = carousel.close_carousel(np.linspace(0.05, 2.0, 6), size=512)
        except BracketError:
            pytest.skip("no sign change of the monodromy angle on this coarse scan")
        assert result.certificate.residual < 1e-5
        assert abs(result.monodromy.angle) < 1e-8

    def test_close_carousel_needs_offsets(self):
        """Test a single offset raises DomainError."""
        with pytest.raises(DomainError):
            carousel.close_carousel([0.5])


class TestMinorInequality:
    """Tests for Σ a_i ≥ 2n cos(π/n)."""

    def test_equality_for_regular(self):
        """Test the regular polygon attains the bound."""
        result = carousel.minor_inequality_check(regular_polygon(5))
        assert result.equality
        assert result.lhs == pytest.approx(result.rhs)

    def test_strict_for_perturbed(self, decagon):
        """Test a perturbed decagon lies strictly above the bound."""
        result = carousel.minor_inequality_check(decagon)
        assert not result.equality
        assert result.lhs > result.rhs
