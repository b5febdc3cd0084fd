"""Weierstrass elliptic functions on rectangular lattices.

The lattice is generated by 2ω (real) and 2ω′ = 2i·omega_prime_im. Arguments are
reduced to the fundamental rectangle centred at the origin and evaluated through
the product form of the Jacobi theta function θ₁ with nome q = exp(−π·ω′/ω).
All series are summed in logarithmic form so that large imaginary parts never
overflow.
"""

import logging
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from src.errors import ConstructionError, DomainError, PoleError

logger = logging.getLogger(__name__)

POLE_TOLERANCE = 1e-10
_SERIES_EPS = 1e-18
_MAX_TERMS = 80
_MAX_DUAL_TERMS = 4096
LEGENDRE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class Lattice:
    """Rectangular period lattice with real invariants.

    Attributes:
        omega: Real half-period ω.
        omega_prime_im: Imaginary part of the half-period ω′.
        g2: Invariant g₂.
        g3: Invariant g₃.
        e1: ℘(ω).
        e2: ℘(ω + ω′).
        e3: ℘(ω′).
        eta: ζ(ω).
        eta_prime: ζ(ω′), purely imaginary.
    """

    omega: float
    omega_prime_im: float
    g2: float
    g3: float
    e1: float
    e2: float
    e3: float
    eta: complex
    eta_prime: complex

    @property
    def omega_prime(self) -> complex:
        return complex(0.0, self.omega_prime_im)

    @property
    def log_nome(self) -> float:
        return -np.pi * self.omega_prime_im / self.omega

    @property
    def nome(self) -> float:
        return float(np.exp(self.log_nome))

    def legendre_residual(self) -> float:
        """|η·ω′ − η′·ω − iπ/2| with η and η′ summed from separate q-series."""
        return abs(self.eta * self.omega_prime - self.eta_prime * self.omega - 0.5j * np.pi)


def _term_count(log_nome: float, cap: int = _MAX_TERMS) -> int:
    # q^(2n) below the series epsilon
    terms = int(np.ceil(np.log(_SERIES_EPS) / (2.0 * log_nome))) + 1
    return max(2, min(terms, cap))


def _q2n(
    log_nome: float, cap: int = _MAX_TERMS
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    n = np.arange(1, _term_count(log_nome, cap) + 1, dtype=float)
    return n, np.exp(2.0 * n * log_nome)


def _eta(omega: float, log_nome: float, cap: int = _MAX_TERMS) -> float:
    _, q2n = _q2n(log_nome, cap)
    lambert = np.sum(q2n / (1.0 - q2n) ** 2)
    return float(np.pi**2 / (12.0 * omega) * (1.0 - 24.0 * lambert))


def _eta_prime(omega: float, omega_prime_im: float) -> complex:
    # ζ(iz; Λ) = −i·ζ(z; Λ/i), and Λ/i has real half-period omega_prime_im
    dual_log_nome = -np.pi * omega / omega_prime_im
    return -1j * _eta(omega_prime_im, dual_log_nome, _MAX_DUAL_TERMS)


def _invariants(omega: float, log_nome: float) -> tuple[float, float]:
    n, q2n = _q2n(log_nome)
    scale = np.pi / (2.0 * omega)
    s3 = np.sum(n**3 * q2n / (1.0 - q2n))
    s5 = np.sum(n**5 * q2n / (1.0 - q2n))
    g2 = scale**4 * (4.0 / 3.0) * (1.0 + 240.0 * s3)
    g3 = scale**6 * (8.0 / 27.0) * (1.0 - 504.0 * s5)
    return float(g2), float(g3)


class _Evaluator:
    """Shared reduction and theta-series machinery for one lattice."""

    def __init__(self, lattice: Lattice) -> None:
        self.lattice = lattice
        self.omega = lattice.omega
        self.log_nome = lattice.log_nome
        self.n, self.q2n = _q2n(self.log_nome)
        self.scale = np.pi / (2.0 * self.omega)

    def reduce(
        self, z: ArrayLike
    ) -> tuple[NDArray[np.complex128], NDArray[np.float64], NDArray[np.float64]]:
        z = np.asarray(z, dtype=complex)
        m = np.rint(z.real / (2.0 * self.omega))
        n = np.rint(z.imag / (2.0 * self.lattice.omega_prime_im))
        z0 = z - 2.0 * m * self.omega - 2.0j * n * self.lattice.omega_prime_im
        return z0, m, n

    def check_poles(self, z0: NDArray[np.complex128]) -> None:
        if np.any(np.abs(z0) < POLE_TOLERANCE):
            raise PoleError("argument within tolerance of a lattice point")

    def theta_terms(
        self, v: NDArray[np.complex128]
    ) -> tuple[NDArray[np.complex128], NDArray[np.complex128]]:
        """A_n = q^{2n} e^{2iv}, B_n = q^{2n} e^{−2iv}, each of modulus below 1."""
        log_q2n = 2.0 * self.n * self.log_nome
        vv = v[..., None]
        a = np.exp(log_q2n + 2j * vv)
        b = np.exp(log_q2n - 2j * vv)
        return a, b

    @staticmethod
    def trig(v: NDArray[np.complex128]) -> tuple[NDArray, NDArray, NDArray]:
        """Overflow-free cot v, csc² v and log sin v."""
        sign = np.where(v.imag >= 0.0, 1.0, -1.0)
        w = sign * v
        e = np.exp(2j * w)
        with np.errstate(divide="ignore", invalid="ignore"):
            cot = sign * 1j * (e + 1.0) / (e - 1.0)
            csc2 = -4.0 * e / (1.0 - e) ** 2
            log_sin = np.log(0.5j) - 1j * w + np.log1p(-e)
        log_sin = log_sin + np.where(sign < 0, 1j * np.pi, 0.0)
        return cot, csc2, log_sin


def _finish(value: NDArray, like: ArrayLike) -> complex | NDArray[np.complex128]:
    if np.ndim(like) == 0:
        return complex(value)
    return value


def lattice_from_halfperiods(omega: float, omega_prime_im: float) -> Lattice:
    """Build a rectangular lattice from its half-periods.

    Args:
        omega: Real half-period ω.
        omega_prime_im: Imaginary part of ω′.

    Returns:
        The lattice with invariants, branch roots and eta constants.

    Raises:
        DomainError: If either half-period is non-finite or non-positive.
        ConstructionError: If the roots disagree with the cubic or the eta
            constants violate Legendre's relation.
    """
    if not (np.isfinite(omega) and np.isfinite(omega_prime_im)):
        raise DomainError("half-periods must be finite")
    if omega <= 0 or omega_prime_im <= 0:
        raise DomainError("half-periods must be positive")

    log_nome = -np.pi * omega_prime_im / omega
    eta = _eta(omega, log_nome)
    omega_prime = complex(0.0, omega_prime_im)
    eta_prime = _eta_prime(omega, omega_prime_im)
    legendre = abs(eta * omega_prime - eta_prime * omega - 0.5j * np.pi)
    if legendre > LEGENDRE_TOLERANCE * (1.0 + abs(eta * omega_prime)):
        raise ConstructionError(f"eta constants violate Legendre's relation by {legendre:.3e}")
    g2, g3 = _invariants(omega, log_nome)

    provisional = Lattice(omega, omega_prime_im, g2, g3, 0.0, 0.0, 0.0, eta, eta_prime)
    series_roots = np.array(
        [
            wp(omega, provisional).real,
            wp(omega + omega_prime, provisional).real,
            wp(omega_prime, provisional).real,
        ]
    )
    roots = np.sort(_polish_roots(series_roots, g2, g3))[::-1]

    cubic_roots = np.sort(np.roots([4.0, 0.0, -g2, -g3]).real)[::-1]
    scale = 1.0 + np.max(np.abs(roots))
    # double roots are only resolved to sqrt(eps) by the companion matrix
    if np.max(np.abs(cubic_roots - roots)) > 1e-6 * scale:
        raise ConstructionError("series roots disagree with the cubic 4x^3 - g2 x - g3")
    if not roots[0] > roots[1]:
        raise ConstructionError("branch roots are not ordered e1 > e2")

    lattice = Lattice(
        omega=float(omega),
        omega_prime_im=float(omega_prime_im),
        g2=g2,
        g3=g3,
        e1=float(roots[0]),
        e2=float(roots[1]),
        e3=float(roots[2]),
        eta=complex(eta),
        eta_prime=complex(eta_prime),
    )
    logger.debug(
        "Built lattice",
        extra={"omega": omega, "omega_prime_im": omega_prime_im, "g2": g2, "g3": g3},
    )
    return lattice


def _polish_roots(seeds: NDArray[np.float64], g2: float, g3: float) -> NDArray[np.float64]:
    """Newton polish on 4x³ − g₂x − g₃, accepting only steps that shrink the residual."""

    def cubic(x: float) -> float:
        return 4.0 * x**3 - g2 * x - g3

    polished = []
    for x in seeds:
        for _ in range(4):
            slope = 12.0 * x**2 - g2
            if slope == 0.0:
                break
            candidate = x - cubic(x) / slope
            if abs(cubic(candidate)) >= abs(cubic(x)):
                break
            x = candidate
        polished.append(x)
    return np.array(polished)


def zeta(z: ArrayLike, lattice: Lattice) -> complex | NDArray[np.complex128]:
    """Weierstrass ζ, quasi-periodic with ζ(z + 2ω) = ζ(z) + 2η."""
    ev = _Evaluator(lattice)
    z0, m, n = ev.reduce(z)
    ev.check_poles(z0)
    v = ev.scale * z0
    cot, _, _ = ev.trig(v)
    a, b = ev.theta_terms(v)
    log_derivative = cot + np.sum(-2j * a / (1.0 - a) + 2j * b / (1.0 - b), axis=-1)
    value = lattice.eta * z0 / lattice.omega + ev.scale * log_derivative
    value = value + 2.0 * m * lattice.eta + 2.0 * n * lattice.eta_prime
    return _finish(value, z)


def wp(z: ArrayLike, lattice: Lattice) -> complex | NDArray[np.complex128]:
    """Weierstrass ℘."""
    ev = _Evaluator(lattice)
    z0, _, _ = ev.reduce(z)
    ev.check_poles(z0)
    v = ev.scale * z0
    _, csc2, _ = ev.trig(v)
    a, b = ev.theta_terms(v)
    series = np.sum(a / (1.0 - a) ** 2 + b / (1.0 - b) ** 2, axis=-1)
    value = -lattice.eta / lattice.omega + ev.scale**2 * (csc2 - 4.0 * series)
    return _finish(value, z)


def wp_prime(z: ArrayLike, lattice: Lattice) -> complex | NDArray[np.complex128]:
    """Derivative ℘′."""
    ev = _Evaluator(lattice)
    z0, _, _ = ev.reduce(z)
    ev.check_poles(z0)
    v = ev.scale * z0
    cot, csc2, _ = ev.trig(v)
    a, b = ev.theta_terms(v)
    series = np.sum(a * (1.0 + a) / (1.0 - a) ** 3 - b * (1.0 + b) / (1.0 - b) ** 3, axis=-1)
    value = -(ev.scale**3) * (2.0 * csc2 * cot + 8j * series)
    return _finish(value, z)


def log_sigma(z: ArrayLike, lattice: Lattice) -> complex | NDArray[np.complex128]:
    """A logarithm of σ(z); the branch is arbitrary but exp(log_sigma) is exact.

    Ratios of σ-values with large arguments are formed in this representation.
    """
    ev = _Evaluator(lattice)
    z0, m, n = ev.reduce(z)
    v = ev.scale * z0
    _, _, log_sin = ev.trig(v)
    a, b = ev.theta_terms(v)
    product = np.sum(np.log1p(-a) + np.log1p(-b) - 2.0 * np.log1p(-ev.q2n), axis=-1)
    value = (
        np.log(2.0 * lattice.omega / np.pi)
        + lattice.eta * z0**2 / (2.0 * lattice.omega)
        + log_sin
        + product
    )
    shift = 2.0 * m * lattice.eta + 2.0 * n * lattice.eta_prime
    value = value + shift * (z0 + m * lattice.omega + n * lattice.omega_prime)
    value = value + 1j * np.pi * np.mod(m + n + m * n, 2)
    return _finish(value, z)


def sigma(z: ArrayLike, lattice: Lattice) -> complex | NDArray[np.complex128]:
    """Weierstrass σ; zero on the lattice."""
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        value = np.exp(np.asarray(log_sigma(z, lattice)))
    value = np.where(np.isnan(value), 0.0, value)
    return _finish(value, z)


@dataclass(frozen=True)
class DegenerateFunctions:
    """Limits of ζ, σ and ℘ as the imaginary half-period tends to infinity."""

    omega: float
    c: float

    @property
    def root(self) -> float:
        """√(3c) = π/(2ω)."""
        return float(np.sqrt(3.0 * self.c))

    def _sin(self, z: ArrayLike) -> NDArray[np.complex128]:
        s = np.sin(self.root * np.asarray(z, dtype=complex))
        if np.any(np.abs(s) < POLE_TOLERANCE):
            raise PoleError("argument at a pole of the degenerate functions")
        return s

    def zeta0(self, z: ArrayLike) -> complex | NDArray[np.complex128]:
        zz = np.asarray(z, dtype=complex)
        value = self.c * zz + self.root * np.cos(self.root * zz) / self._sin(zz)
        return _finish(value, z)

    def wp0(self, z: ArrayLike) -> complex | NDArray[np.complex128]:
        value = -self.c + 3.0 * self.c / self._sin(z) ** 2
        return _finish(value, z)

    def sigma0(self, z: ArrayLike) -> complex | NDArray[np.complex128]:
        zz = np.asarray(z, dtype=complex)
        value = np.exp(0.5 * self.c * zz**2) * np.sin(self.root * zz) / self.root
        return _finish(value, z)

    def as_callables(self) -> tuple[float, Callable, Callable, Callable]:
        return self.c, self.zeta0, self.sigma0, self.wp0


def degenerate_functions(omega: float) -> DegenerateFunctions:
    """Trigonometric limits of the lattice functions, with c = (1/3)(π/2ω)²."""
    if not (np.isfinite(omega) and omega > 0):
        raise DomainError("omega must be finite and positive")
    c = (np.pi / (2.0 * omega)) ** 2 / 3.0
    return DegenerateFunctions(omega=float(omega), c=float(c))
