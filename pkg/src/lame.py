"""Lamé curves: quasi-periodic Lamé solutions as self-Bäcklund curves.

For ω = π/2k the Lamé equation X″ = (2℘(t+ω′) + ℘(a))X has the solution

    X₊(t) = e^{−tζ(a)} σ(a+t+ω′)σ(ω′) / (σ(a+ω′)σ(t+ω′)),

with Floquet multiplier e^{iπn/k} over 2ω when aζ(ω) − ωζ(a) = iπ(n/2k + m).
Read as a plane curve it is π-anti-periodic, and it is self-Bäcklund for the
rotation numbers α where the reduced phase ∫₀^α (Im ζ(a+s) − Im ζ(a)) ds is a
multiple of π.
"""

import logging
import math
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import legendre
from numpy.typing import NDArray
from scipy.optimize import brentq

from src import elliptic
from src.curves import CentroaffineCurve, infinitesimal_angles, verify_self_backlund
from src.elliptic import Lattice
from src.errors import ConstructionError, ContinuationError, ParameterError, ValidationFailure

logger = logging.getLogger(__name__)

QUANTIZATION_TOLERANCE = 1e-10
CERTIFICATE_TOLERANCE = 1e-7
BRENT_RTOL = 4.0 * np.finfo(float).eps
CHORD_FLOOR = 1e-2
_NODES, _WEIGHTS = legendre.leggauss(24)


@dataclass(frozen=True)
class LameParams:
    """Discrete data (k, n, m) with the solved spectral parameter a."""

    k: int
    n: int
    m: int
    omega_prime_im: float
    a: complex
    lattice: Lattice

    @property
    def omega(self) -> float:
        return self.lattice.omega

    @property
    def multiplier(self) -> complex:
        return complex(np.exp(1j * np.pi * self.n / self.k))

    @property
    def target(self) -> float:
        return float(np.pi * (self.n / (2.0 * self.k) + self.m))

    def quantization(self, a: complex | None = None) -> complex:
        """f(a) = aζ(ω) − ωζ(a)."""
        a = self.a if a is None else a
        return quantization(a, self.lattice)

    @property
    def eigenvalue(self) -> float:
        """λ = −℘(a)."""
        return float(-np.real(elliptic.wp(self.a, self.lattice)))


@dataclass(frozen=True)
class LameCurve:
    params: LameParams
    curve: CentroaffineCurve
    wronskian_scale: float
    winding: int
    closure_residual: float
    quasi_periodicity_residual: float
    wronskian_variation: float
    potential: NDArray[np.float64]


def quantization(a: complex, lattice: Lattice) -> complex:
    return complex(a * lattice.eta - lattice.omega * elliptic.zeta(a, lattice))


def validate_triple(k: int, n: int, m: int) -> None:
    if k < 2:
        raise ParameterError("k must be at least 2")
    if n % 2 == 0 or not 0 < n < k or math.gcd(n, k) != 1:
        raise ParameterError(f"n={n} must be odd, in (0, k) and coprime to k={k}")
    if m < 0:
        raise ParameterError("m must be non-negative")


def degenerate_b(k: int, n: int = 1) -> float:
    """Limit of Im(a − ω) for m = 0 as the imaginary half-period grows."""
    omega = np.pi / (2.0 * k)
    return float(2.0 * omega / np.pi * np.arctanh(n / k))


def solve_a(k: int, n: int, m: int, omega_prime_im: float = 1.0) -> LameParams:
    """Solve aζ(ω) − ωζ(a) = iπ(n/2k + m) on the segment where f is imaginary.

    Raises:
        ParameterError: If (k, n, m) is inadmissible or the segment does not bracket.
    """
    validate_triple(k, n, m)
    omega = np.pi / (2.0 * k)
    lattice = elliptic.lattice_from_halfperiods(omega, omega_prime_im)
    target = np.pi * (n / (2.0 * k) + m)

    if m == 0:

        def point(y: float) -> complex:
            return complex(omega, y)

        lower, upper = 0.0, omega_prime_im
    else:

        def point(y: float) -> complex:
            return complex(0.0, y)

        upper = omega_prime_im
        lower = 0.5 * omega_prime_im
        for _ in range(200):
            if quantization(point(lower), lattice).imag > target:
                break
            lower *= 0.5
        else:
            raise ParameterError("could not bracket the spectral parameter near 0")

    def residual(y: float) -> float:
        return quantization(point(y), lattice).imag - target

    lo_value, hi_value = residual(lower), residual(upper)
    if lo_value * hi_value > 0:
        raise ParameterError(
            f"segment does not bracket the quantization target for (k,n,m)=({k},{n},{m})"
        )
    y = brentq(residual, lower, upper, xtol=1e-15, rtol=BRENT_RTOL, maxiter=200)
    a = point(y)
    error = abs(quantization(a, lattice) - 1j * target)
    if error > QUANTIZATION_TOLERANCE:
        raise ParameterError(f"quantization residual {error:.3e} for (k,n,m)=({k},{n},{m})")
    logger.info(
        "Solved spectral parameter",
        extra={"k": k, "n": n, "m": m, "omega_prime_im": omega_prime_im, "a_im": y},
    )
    return LameParams(k=k, n=n, m=m, omega_prime_im=omega_prime_im, a=a, lattice=lattice)


def _x_plus(params: LameParams, t: NDArray) -> tuple[NDArray, NDArray]:
    """X₊ and X₊′ evaluated directly at arbitrary real t."""
    lattice, a = params.lattice, params.a
    wp_ = lattice.omega_prime
    t = np.asarray(t, dtype=complex)
    zeta_a = elliptic.zeta(a, lattice)
    log_x = (
        elliptic.log_sigma(a + t + wp_, lattice)
        + elliptic.log_sigma(wp_, lattice)
        - elliptic.log_sigma(a + wp_, lattice)
        - elliptic.log_sigma(t + wp_, lattice)
        - t * zeta_a
    )
    x = np.exp(log_x)
    logarithmic = (
        elliptic.zeta(a + t + wp_, lattice) - zeta_a - elliptic.zeta(t + wp_, lattice)
    )
    return x, x * logarithmic


def evaluate(params: LameParams, t: NDArray) -> tuple[NDArray, NDArray]:
    """X₊ and X₊′ through the Floquet relation X(t + 2ω) = e^{iπn/k}X(t)."""
    t = np.asarray(t, dtype=float)
    period = 2.0 * params.omega
    turns = np.floor(t / period)
    tau = t - turns * period
    x, dx = _x_plus(params, tau)
    factor = np.exp(1j * np.pi * params.n * turns / params.k)
    return factor * x, factor * dx


def _winding(z: NDArray) -> int:
    angles = np.unwrap(np.angle(np.append(z, z[0])))
    return int(np.rint((angles[-1] - angles[0]) / (2.0 * np.pi)))


def build_curve(params: LameParams, size: int = 1024) -> LameCurve:
    """Sample X₊/√W over one period as a closed centroaffine curve.

    Raises:
        ConstructionError: If X₊(0) ≠ 1, the Wronskian is not positive, or the
            closure, Floquet or winding checks fail.
    """
    x0, dx0 = _x_plus(params, np.array([0.0]))
    if abs(x0[0] - 1.0) > 1e-10:
        raise ConstructionError(f"X₊(0) = {x0[0]!r}, expected 1")
    b = float(dx0[0].imag)
    if abs(dx0[0].real) > 1e-8 * (1.0 + abs(b)) or b <= 0:
        raise ConstructionError(f"X₊′(0) = {dx0[0]!r} is not a positive imaginary number")

    t_full = 2.0 * np.pi * np.arange(size) / size
    x, dx = evaluate(params, t_full)
    wronskians = np.imag(np.conj(x) * dx)
    variation = float(np.max(np.abs(wronskians / b - 1.0)))
    if variation > 1e-9:
        raise ConstructionError(f"Wronskian of X₊ varies by {variation:.3e}")

    checkpoints = t_full[:: max(1, size // 64)]
    shifted, _ = _x_plus(params, checkpoints + np.pi)
    direct, _ = _x_plus(params, checkpoints)
    closure = float(np.max(np.abs(shifted + direct)))
    ahead, _ = _x_plus(params, checkpoints + 2.0 * params.omega)
    quasi = float(np.max(np.abs(ahead - params.multiplier * direct)))
    if max(closure, quasi) > 1e-8 * max(1.0, float(np.max(np.abs(direct)))):
        raise ConstructionError(
            f"Lamé curve fails closure ({closure:.3e}) or Floquet relation ({quasi:.3e})"
        )

    scale = np.sqrt(b)
    z = x / scale
    half = size // 2
    potential = np.real(
        2.0 * elliptic.wp(t_full + params.lattice.omega_prime, params.lattice)
        + elliptic.wp(params.a, params.lattice)
    )
    curve = CentroaffineCurve.from_half(np.column_stack([z.real, z.imag])[:half])
    curve.validate()

    winding = _winding(z)
    expected = 2 * params.k * ((params.m + 1) // 2) + params.n
    if winding != expected:
        raise ConstructionError(f"winding {winding} differs from the predicted {expected}")
    logger.info(
        "Built Lamé curve",
        extra={
            "k": params.k,
            "n": params.n,
            "m": params.m,
            "winding": winding,
            "closure": closure,
            "wronskian_variation": variation,
        },
    )
    return LameCurve(
        params=params,
        curve=curve,
        wronskian_scale=float(scale),
        winding=winding,
        closure_residual=closure / scale,
        quasi_periodicity_residual=quasi / scale,
        wronskian_variation=variation,
        potential=potential,
    )


def _phase_integrand(params: LameParams, s: NDArray) -> NDArray:
    zeta_a = elliptic.zeta(params.a, params.lattice)
    return np.imag(elliptic.zeta(params.a + np.asarray(s, dtype=float), params.lattice)) - np.imag(
        zeta_a
    )


def _panel_width(params: LameParams) -> float:
    # distance from the line Im = Im a to the nearest pole row
    height = params.a.imag
    clearance = min(height, 2.0 * params.omega_prime_im - height)
    return min(0.5 * params.omega, clearance)


def _integrate(params: LameParams, lo: NDArray, hi: NDArray) -> NDArray:
    """∫_lo^hi of the phase integrand, elementwise over interval arrays."""
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    width = _panel_width(params)
    panels = max(1, int(np.ceil(np.max(np.abs(hi - lo)) / width)))
    edges = lo[:, None] + (hi - lo)[:, None] * np.linspace(0.0, 1.0, panels + 1)[None, :]
    left, right = edges[:, :-1], edges[:, 1:]
    mid = 0.5 * (left + right)
    half = 0.5 * (right - left)
    nodes = mid[..., None] + half[..., None] * _NODES
    values = _phase_integrand(params, nodes.ravel()).reshape(nodes.shape)
    return np.sum(half * np.sum(values * _WEIGHTS, axis=-1), axis=-1)


def reduced_phase(params: LameParams, alpha: NDArray | float) -> NDArray:
    """Φ(α) = ∫₀^α (Im ζ(a+s) − Im ζ(a)) ds using periodicity over 2ω."""
    alpha = np.atleast_1d(np.asarray(alpha, dtype=float))
    period = 2.0 * params.omega
    per_period = float(_integrate(params, np.array([0.0]), np.array([period]))[0])
    turns = np.floor(alpha / period)
    rest = alpha - turns * period
    return turns * per_period + _integrate(params, np.zeros_like(rest), rest)


@dataclass(frozen=True)
class BacklundAngle:
    alpha: float
    c: float
    level: int
    residual: float
    slope: float


def self_backlund_angles(
    params: LameParams, lame_curve: LameCurve | None = None, scan_points: int = 2047
) -> list[BacklundAngle]:
    """Certified rotation numbers α ∈ (0, π) of a Lamé curve.

    Only the levels l = 1, …, k − n − 1 are scanned; the level k − n is met at
    α = π, where γ(t + π) = −γ(t) and the chord constant vanishes.

    Raises:
        ValidationFailure: If a root of the reduced equation fails the direct
            determinant test, is not transversal, or the count for m = 0 is not
            k − n − 1.
    """
    if lame_curve is None:
        lame_curve = build_curve(params)
    grid = np.linspace(0.0, np.pi, scan_points + 1)
    steps = _integrate(params, grid[:-1], grid[1:])
    phase = np.concatenate([[0.0], np.cumsum(steps)])

    k, n = params.k, params.n
    angles: list[BacklundAngle] = []
    for j in range(scan_points):
        lo_level = phase[j] / np.pi
        hi_level = phase[j + 1] / np.pi
        first = max(int(np.floor(min(lo_level, hi_level))) + 1, 1)
        last = min(int(np.ceil(max(lo_level, hi_level))) - 1, k - n - 1)
        for level in range(first, last + 1):

            def offset(alpha: float, j: int = j, level: int = level) -> float:
                partial = _integrate(params, np.array([grid[j]]), np.array([alpha]))[0]
                return phase[j] + partial - level * np.pi

            alpha = brentq(offset, grid[j], grid[j + 1], xtol=1e-14, rtol=BRENT_RTOL)
            if not 1e-6 < alpha < np.pi - 1e-6:
                continue
            slope = float(_phase_integrand(params, np.array([alpha]))[0])
            if abs(slope) < 1e-10:
                raise ValidationFailure(f"reduced equation root α={alpha} is not transversal")
            certificate = verify_self_backlund(lame_curve.curve, alpha)
            if abs(certificate.c) < CHORD_FLOOR:
                logger.debug("Skipping degenerate root", extra={"alpha": alpha, "c": certificate.c})
                continue
            if certificate.residual > CERTIFICATE_TOLERANCE:
                logger.error(
                    "Rotation number failed the determinant test",
                    extra={"alpha": alpha, "residual": certificate.residual},
                )
                raise ValidationFailure(
                    f"α={alpha} fails the determinant test (residual {certificate.residual:.3e})"
                )
            angles.append(
                BacklundAngle(
                    alpha=float(alpha),
                    c=certificate.c,
                    level=level,
                    residual=certificate.residual,
                    slope=slope,
                )
            )

    logger.info(
        "Certified self-Bäcklund angles",
        extra={
            "k": k,
            "n": n,
            "m": params.m,
            "count": len(angles),
            "predicted_k_minus_2": k - 2,
            "predicted_k_minus_n_minus_1": k - n - 1,
        },
    )
    if params.m == 0 and len(angles) != k - n - 1:
        raise ValidationFailure(f"found {len(angles)} angles, expected {k - n - 1}")
    return angles


@dataclass(frozen=True)
class DeformationStep:
    s: float
    curve: LameCurve
    angles: list[BacklundAngle]

    @property
    def nome(self) -> float:
        return self.curve.params.lattice.nome


@dataclass(frozen=True)
class DeformationFamily:
    k: int
    steps: list[DeformationStep]
    limits: list[float]
    infinitesimal: list[float]


def _deformation_step(k: int, s: float, omega_prime_im: float, size: int) -> DeformationStep:
    params = solve_a(k, 1, 0, omega_prime_im / s)
    curve = build_curve(params, size)
    return DeformationStep(s=s, curve=curve, angles=self_backlund_angles(params, curve))


def deformation_family(
    k: int,
    s_grid: Sequence[float],
    omega_prime_im: float = 1.0,
    size: int = 1024,
    threads: int = 1,
) -> DeformationFamily:
    """Lamé curves with ω′_s = ω′/s deforming the circle (s → 0).

    The rotation numbers are followed along the grid and extrapolated linearly
    in the nome to s = 0, where they must solve tan(kα) = k·tanα.

    Raises:
        ParameterError: For k < 3 or s outside (0, 1].
        ContinuationError: If a branch jumps or misses its limit.
    """
    if k < 3:
        raise ParameterError("deformations need k ≥ 3")
    s_values = [float(s) for s in s_grid]
    if len(s_values) < 2 or any(not 0 < s <= 1 for s in s_values):
        raise ParameterError("s_grid needs at least two values in (0, 1]")
    if any(b >= a for a, b in zip(s_values, s_values[1:], strict=False)):
        raise ParameterError("s_grid must be decreasing")

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            steps = list(
                pool.map(lambda s: _deformation_step(k, s, omega_prime_im, size), s_values)
            )
    else:
        steps = [_deformation_step(k, s, omega_prime_im, size) for s in s_values]

    bound = np.pi / (2.0 * k)
    for before, after in zip(steps, steps[1:], strict=False):
        for left, right in zip(before.angles, after.angles, strict=True):
            if abs(left.alpha - right.alpha) > bound:
                raise ContinuationError(
                    f"rotation number jumps from {left.alpha} to {right.alpha} "
                    f"between s={before.s} and s={after.s}"
                )

    last, previous = steps[-1], steps[-2]
    q1, q2 = last.nome, previous.nome
    limits = []
    for near, far in zip(last.angles, previous.angles, strict=True):
        if q2 == q1:
            limits.append(near.alpha)
        else:
            limits.append(near.alpha - q1 * (far.alpha - near.alpha) / (q2 - q1))

    expected = infinitesimal_angles(k)
    for limit, root in zip(limits, expected, strict=True):
        if abs(limit - root) > 1e-4:
            raise ContinuationError(f"extrapolated angle {limit} misses the limit {root}")
    logger.info("Deformation family complete", extra={"k": k, "limits": limits})
    return DeformationFamily(k=k, steps=steps, limits=limits, infinitesimal=expected)
