"""Tests for Weierstrass functions."""

from dataclasses import replace

import numpy as np
import pytest

from src import elliptic
from src.errors import DomainError, PoleError


def _points(lattice: elliptic.Lattice, rng: np.random.Generator, count: int) -> np.ndarray:
    """Random points in the period rectangle kept away from lattice points."""
    x = rng.uniform(0.1, 1.9, count) * lattice.omega
    y = rng.uniform(0.1, 1.9, count) * lattice.omega_prime_im
    return x + 1j * y


class TestLattice:
    """Tests for lattice construction."""

    def test_roots_ordered_and_sum_to_zero(self, lattice):
        """Test e1 > e2 > e3 with e1 + e2 + e3 = 0."""
        assert lattice.e1 > lattice.e2 > lattice.e3
        assert abs(lattice.e1 + lattice.e2 + lattice.e3) < 1e-9 * (1.0 + abs(lattice.e1))

    def test_legendre_relation(self, lattice):
        """Test ηω′ − η′ω = iπ/2."""
        assert lattice.legendre_residual() < 1e-12

    def test_eta_constants_match_zeta(self, lattice):
        """Test η = ζ(ω) and η′ = ζ(ω′) against the theta-series evaluation."""
        assert abs(elliptic.zeta(lattice.omega, lattice) - lattice.eta) < 1e-10
        scale = 1.0 + abs(lattice.eta_prime)
        assert abs(elliptic.zeta(lattice.omega_prime, lattice) - lattice.eta_prime) < 1e-10 * scale

    def test_legendre_detects_a_wrong_eta(self, lattice):
        """Test perturbing η shows up in the residual."""
        broken = replace(lattice, eta=lattice.eta * (1.0 + 1e-6))
        assert broken.legendre_residual() > 1e-7

    @pytest.mark.parametrize("omega,omega_prime_im", [(np.pi / 10.0, 20.0), (np.pi / 6.0, 10.0)])
    def test_tall_lattices(self, omega, omega_prime_im):
        """Test slowly converging dual series still satisfy Legendre's relation."""
        lattice = elliptic.lattice_from_halfperiods(omega, omega_prime_im)
        assert lattice.legendre_residual() < 1e-9 * (1.0 + abs(lattice.eta * lattice.omega_prime))
        assert lattice.eta_prime.real == 0.0

    def test_roots_solve_cubic(self, lattice):
        """Test every e_i is a root of 4x³ − g2x − g3."""
        for e in (lattice.e1, lattice.e2, lattice.e3):
            scale = 1.0 + abs(lattice.g2 * e) + abs(lattice.g3)
            assert abs(4.0 * e**3 - lattice.g2 * e - lattice.g3) < 1e-9 * scale

    @pytest.mark.parametrize("omega,omega_prime_im", [(0.0, 1.0), (1.0, -1.0), (np.inf, 1.0)])
    def test_rejects_bad_halfperiods(self, omega, omega_prime_im):
        """Test non-positive or infinite half-periods raise DomainError."""
        with pytest.raises(DomainError):
            elliptic.lattice_from_halfperiods(omega, omega_prime_im)


class TestWeierstrass:
    """Tests for ℘, ℘′, ζ and σ."""

    def test_wp_matches_row_series(self, lattice, rng, wp_series):
        """Test ℘ against the cosecant row sums."""
        for z in _points(lattice, rng, 25):
            expected = wp_series(z, lattice.omega, lattice.omega_prime_im)
            assert abs(elliptic.wp(z, lattice) - expected) < 1e-9 * (1.0 + abs(expected))

    def test_differential_equation(self, lattice, rng):
        """Test ℘′² = 4℘³ − g2℘ − g3."""
        z = _points(lattice, rng, 1000)
        p = elliptic.wp(z, lattice)
        dp = elliptic.wp_prime(z, lattice)
        lhs = dp**2
        rhs = 4.0 * p**3 - lattice.g2 * p - lattice.g3
        assert np.max(np.abs(lhs - rhs) / (1.0 + np.abs(lhs))) < 1e-9

    def test_addition_formula(self, lattice, rng):
        """Test ℘(u+v) = ¼((℘′u − ℘′v)/(℘u − ℘v))² − ℘u − ℘v."""
        u = _points(lattice, rng, 200)
        v = _points(lattice, rng, 200)
        pu, pv = elliptic.wp(u, lattice), elliptic.wp(v, lattice)
        du, dv = elliptic.wp_prime(u, lattice), elliptic.wp_prime(v, lattice)
        keep = np.abs(pu - pv) > 1e-2
        lhs = elliptic.wp(u + v, lattice)[keep]
        rhs = (0.25 * ((du - dv) / (pu - pv)) ** 2 - pu - pv)[keep]
        assert np.max(np.abs(lhs - rhs) / (1.0 + np.abs(lhs))) < 1e-8

    def test_wp_is_even_and_periodic(self, lattice, rng):
        """Test ℘(−z) = ℘(z) = ℘(z + 2ω) = ℘(z + 2ω′)."""
        z = _points(lattice, rng, 50)
        base = elliptic.wp(z, lattice)
        scale = 1.0 + np.abs(base)
        for other in (-z, z + 2.0 * lattice.omega, z + 2.0 * lattice.omega_prime):
            assert np.max(np.abs(elliptic.wp(other, lattice) - base) / scale) < 1e-10

    def test_zeta_quasi_periodicity(self, lattice, rng):
        """Test ζ(z + 2ω) = ζ(z) + 2η and ζ(z + 2ω′) = ζ(z) + 2η′."""
        z = _points(lattice, rng, 50)
        base = elliptic.zeta(z, lattice)
        shifted = elliptic.zeta(z + 2.0 * lattice.omega, lattice)
        assert np.max(np.abs(shifted - base - 2.0 * lattice.eta)) < 1e-9
        shifted = elliptic.zeta(z + 2.0 * lattice.omega_prime, lattice)
        assert np.max(np.abs(shifted - base - 2.0 * lattice.eta_prime)) < 1e-9

    def test_zeta_derivative_is_minus_wp(self, lattice):
        """Test ζ′ = −℘ by central differences."""
        z = complex(0.7 * lattice.omega, 0.4 * lattice.omega_prime_im)
        h = 1e-5
        numeric = (elliptic.zeta(z + h, lattice) - elliptic.zeta(z - h, lattice)) / (2.0 * h)
        expected = -elliptic.wp(z, lattice)
        assert abs(numeric - expected) < 1e-5 * (1.0 + abs(expected))

    def test_sigma_quasi_periodicity(self, lattice):
        """Test σ(z + 2ω) = −exp(2η(z + ω))σ(z)."""
        z = complex(0.3 * lattice.omega, 0.2 * lattice.omega_prime_im)
        lhs = elliptic.sigma(z + 2.0 * lattice.omega, lattice)
        rhs = -np.exp(2.0 * lattice.eta * (z + lattice.omega)) * elliptic.sigma(z, lattice)
        assert abs(lhs - rhs) < 1e-9 * (1.0 + abs(rhs))

    def test_sigma_vanishes_on_lattice(self, lattice):
        """Test σ(0) = 0 and σ(z) ≈ z near the origin."""
        assert elliptic.sigma(0.0, lattice) == 0
        z = 1e-4 + 1e-4j
        assert abs(elliptic.sigma(z, lattice) - z) < 1e-10

    def test_pole_raises(self, lattice):
        """Test evaluation on a lattice point raises PoleError."""
        with pytest.raises(PoleError):
            elliptic.wp(2.0 * lattice.omega, lattice)
        with pytest.raises(PoleError):
            elliptic.zeta(0.0, lattice)

    def test_array_and_scalar_forms_agree(self, lattice):
        """Test scalar input returns a complex matching the array result."""
        z = np.array([0.3 + 0.1j, 0.5 + 0.2j]) * lattice.omega
        values = elliptic.wp(z, lattice)
        assert isinstance(elliptic.wp(z[0], lattice), complex)
        assert values[0] == pytest.approx(elliptic.wp(z[0], lattice), rel=1e-14)


class TestDegenerateLimit:
    """Tests for the trigonometric limits."""

    def test_large_imaginary_period_matches_trigonometric_forms(self):
        """Test ℘, ζ, σ approach the degenerate functions once ω′/ω ≥ 20."""
        omega = 1.0
        lattice = elliptic.lattice_from_halfperiods(omega, 20.0 * omega)
        limit = elliptic.degenerate_functions(omega)
        z = np.linspace(0.1, 1.9, 40) + 0.3j
        assert np.max(np.abs(elliptic.wp(z, lattice) - limit.wp0(z))) < 1e-6
        assert np.max(np.abs(elliptic.zeta(z, lattice) - limit.zeta0(z))) < 1e-6
        assert np.max(np.abs(elliptic.sigma(z, lattice) - limit.sigma0(z))) < 1e-6

    def test_root_is_quarter_frequency(self):
        """Test √(3c) = π/(2ω)."""
        limit = elliptic.degenerate_functions(np.pi / 6.0)
        assert limit.root == pytest.approx(3.0, rel=1e-14)

    def test_pole_of_degenerate_functions(self):
        """Test the degenerate functions raise at their poles."""
        limit = elliptic.degenerate_functions(1.0)
        with pytest.raises(PoleError):
            limit.wp0(2.0)
