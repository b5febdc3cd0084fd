"""Pytest configuration and fixtures."""

from pathlib import Path

import numpy as np
import pytest

from src import curves, elliptic, lame
from src.config import Config

LATTICES = [(1.0, 1.0), (np.pi / 6.0, 0.9), (0.5, 2.3)]


def wp_oracle(z: complex, omega: float, omega_prime_im: float) -> complex:
    """℘ summed row by row in closed form: each lattice row is a cosecant series."""
    rows = max(4, int(np.ceil(12.0 * omega / omega_prime_im)))
    s = np.pi / (2.0 * omega)
    n = np.arange(-rows, rows + 1)
    offsets = 2.0j * n * omega_prime_im
    total = np.sum(s**2 / np.sin(s * (z - offsets)) ** 2)
    nonzero = n[n != 0]
    constant = s**2 * (1.0 / 3.0 + np.sum(1.0 / np.sin(s * 2.0j * nonzero * omega_prime_im) ** 2))
    return complex(total - constant)


@pytest.fixture
def config(tmp_path: Path) -> Config:
    """Configuration writing into a temporary directory."""
    return Config(output_dir=str(tmp_path / "out"), log_json=False, grid_size=256)


@pytest.fixture(params=LATTICES, ids=["square", "lame-k3", "tall"])
def lattice(request) -> elliptic.Lattice:
    """Rectangular lattices of different shapes."""
    omega, omega_prime_im = request.param
    return elliptic.lattice_from_halfperiods(omega, omega_prime_im)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture
def unit_circle() -> curves.CentroaffineCurve:
    return curves.circle(256)


@pytest.fixture
def ellipse_like() -> curves.CentroaffineCurve:
    """A generic non-conic closed curve."""
    return curves.star_shaped_curve(lambda theta: 1.0 + 0.2 * np.cos(2.0 * theta), 256)


@pytest.fixture(scope="session")
def lame_k3() -> lame.LameCurve:
    """The (3, 1, 0) Lamé curve on a 512-point grid."""
    params = lame.solve_a(3, 1, 0, 1.0)
    return lame.build_curve(params, 512)


@pytest.fixture
def wp_series():
    """Independent ℘ oracle from row-summed cosecant series."""
    return wp_oracle
