"""Hill operator y″ + (λ − p)y = 0, Riccati partners and the KdV/mKdV flows."""

import logging
from collections.abc import Iterable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.typing import NDArray
from scipy import fft, linalg
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from src import spectral
from src.curves import CentroaffineCurve, bracket
from src.errors import (
    DomainError,
    InconsistentCurveError,
    IntegrationError,
    SpectralError,
    StepError,
    UnsupportedError,
    ValidationFailure,
)

logger = logging.getLogger(__name__)

PERIOD = np.pi
HILL_TOLERANCE = 1e-12
GALERKIN_MODES = 48
MAX_MIURA_ORDER = 6
BRENT_RTOL = 4.0 * np.finfo(float).eps


@dataclass(frozen=True)
class PeriodicPotential:
    """Samples of a π-periodic potential on the grid t_j = πj/N."""

    samples: NDArray[np.float64]

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=float)
        if samples.ndim != 1:
            raise DomainError("potential samples must be one-dimensional")
        n = samples.shape[0]
        if n < 8 or n & (n - 1):
            raise DomainError("potential grid size must be a power of two")
        if not np.all(np.isfinite(samples)):
            raise DomainError("potential samples must be finite")
        object.__setattr__(self, "samples", samples)

    @classmethod
    def from_function(cls, func, grid_size: int = 512) -> "PeriodicPotential":
        t = PERIOD * np.arange(grid_size) / grid_size
        return cls(np.asarray(func(t), dtype=float) * np.ones(grid_size))

    @classmethod
    def constant(cls, value: float, grid_size: int = 256) -> "PeriodicPotential":
        return cls(np.full(grid_size, float(value)))

    @property
    def grid_size(self) -> int:
        return self.samples.shape[0]

    @property
    def t(self) -> NDArray[np.float64]:
        return PERIOD * np.arange(self.grid_size) / self.grid_size

    @cached_property
    def _coefficients(self) -> tuple[NDArray, NDArray]:
        n = self.grid_size
        coeffs = fft.fft(self.samples) / n
        k = spectral.wavenumbers(n, PERIOD)
        significant = np.abs(coeffs) > 1e-15 * (1.0 + np.max(np.abs(coeffs)))
        significant[0] = True
        return k[significant], coeffs[significant]

    def __call__(self, t: float) -> float:
        k, coeffs = self._coefficients
        return float(np.real(np.sum(coeffs * np.exp(1j * k * t))))

    @property
    def mean_value(self) -> float:
        """P = −(1/π)∫₀^π p dt."""
        return -float(np.mean(self.samples))

    def derivative(self, order: int = 1) -> NDArray[np.float64]:
        return spectral.derivative(self.samples, PERIOD, order)

    def fourier(self, modes: int) -> NDArray[np.complex128]:
        """Coefficients p̂_m for m = −modes..modes in the basis e^{2imt}."""
        n = self.grid_size
        coeffs = fft.fft(self.samples) / n
        index = np.arange(-modes, modes + 1)
        result = np.where(np.abs(index) < n // 2, coeffs[index % n], 0.0)
        return result


@dataclass(frozen=True)
class FloquetData:
    lam: float
    trace: float
    monodromy: NDArray[np.float64]


def curvature_samples(curve: CentroaffineCurve) -> NDArray[np.float64]:
    """p = [γ″, γ′] at every sample of the curve."""
    if curve.curvature is not None:
        return curve.curvature
    return bracket(curve.derivative(2), curve.derivative(1))


def curvature_of(curve: CentroaffineCurve) -> PeriodicPotential:
    """Centroaffine curvature of a closed curve as a potential over [0, π)."""
    if not curve.closed:
        raise DomainError("curvature_of needs a closed curve")
    residual = curve.wronskian_residual()
    if residual > 1e-6:
        raise InconsistentCurveError(f"Wronskian deviates from 1 by {residual:.3e}")
    p = curvature_samples(curve)
    return PeriodicPotential(p[: curve.size // 2])


def floquet(p: PeriodicPotential, lam: float) -> FloquetData:
    """Period map of y″ = (p − λ)y over [0, π].

    Raises:
        IntegrationError: If the integrator fails or det M drifts from 1.
    """

    def rhs(t: float, state: NDArray) -> NDArray:
        q = p(t) - lam
        return np.array([state[1], q * state[0], state[3], q * state[2]])

    solution = solve_ivp(
        rhs,
        (0.0, PERIOD),
        np.array([1.0, 0.0, 0.0, 1.0]),
        method="DOP853",
        rtol=HILL_TOLERANCE,
        atol=HILL_TOLERANCE,
    )
    if not solution.success:
        raise IntegrationError(f"Hill integration failed at λ={lam}: {solution.message}")
    y1, dy1, y2, dy2 = solution.y[:, -1]
    monodromy = np.array([[y1, y2], [dy1, dy2]])
    det = float(np.linalg.det(monodromy))
    if abs(det - 1.0) > 1e-8 * max(1.0, float(np.max(np.abs(monodromy))) ** 2):
        raise IntegrationError(f"monodromy determinant drifted to {det!r}")
    return FloquetData(lam=float(lam), trace=float(y1 + dy2), monodromy=monodromy)


def discriminant_scan(
    p: PeriodicPotential, lambdas: Iterable[float], threads: int = 1
) -> NDArray[np.float64]:
    """Δ(λ) on a list of spectral parameters."""
    lambdas = list(lambdas)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            traces = list(pool.map(lambda lam: floquet(p, lam).trace, lambdas))
    else:
        traces = [floquet(p, lam).trace for lam in lambdas]
    return np.array(traces)


def galerkin_estimates(p: PeriodicPotential, modes: int = GALERKIN_MODES) -> tuple[float, float]:
    """Lowest periodic and antiperiodic eigenvalues of −d² + p by Fourier–Galerkin."""
    modes = min(modes, p.grid_size // 4)
    coeffs = p.fourier(2 * modes)
    index = np.arange(-modes, modes + 1)
    toeplitz = coeffs[(index[:, None] - index[None, :]) + 2 * modes]
    periodic = np.diag((2.0 * index) ** 2).astype(complex) + toeplitz
    odd = np.arange(-modes, modes)
    toeplitz_odd = coeffs[(odd[:, None] - odd[None, :]) + 2 * modes]
    antiperiodic = np.diag((2.0 * odd + 1.0) ** 2).astype(complex) + toeplitz_odd
    lam0 = float(linalg.eigvalsh(periodic)[0])
    mu0 = float(linalg.eigvalsh(antiperiodic)[0])
    return lam0, mu0


def lambda0(p: PeriodicPotential) -> float:
    """Bottom of the periodic spectrum: the smallest root of Δ(λ) = 2.

    Raises:
        SpectralError: If no bracket is found.
    """
    estimate, anti = galerkin_estimates(p)
    upper = 0.5 * (estimate + anti)
    if floquet(p, upper).trace >= 2.0:
        raise SpectralError("Δ does not drop below 2 above the Galerkin estimate")
    step = 1.0
    lower = estimate - step
    for _ in range(40):
        if floquet(p, lower).trace > 2.0:
            break
        step *= 2.0
        lower = estimate - step
    else:
        raise SpectralError("could not bracket λ0 from below")

    root = brentq(
        lambda lam: floquet(p, lam).trace - 2.0, lower, upper, xtol=1e-13, rtol=BRENT_RTOL
    )
    logger.debug("Located λ0", extra={"lambda0": root, "galerkin": estimate})
    return float(root)


def c_max(p: PeriodicPotential, lam0: float | None = None) -> float:
    """Largest |c| for which a closed c-related curve exists.

    Raises:
        DomainError: If λ0 ≥ 0, so p is not the curvature of a closed curve.
    """
    if lam0 is None:
        lam0 = lambda0(p)
    if lam0 >= 0:
        raise DomainError(f"λ0 = {lam0} is not negative; p is not a closed-curve curvature")
    return float(1.0 / np.sqrt(-lam0))


def _decaying_eigenvector(data: FloquetData) -> tuple[float, NDArray]:
    m = data.monodromy
    half = 0.5 * data.trace
    mu = half - np.sqrt(max(half * half - 1.0, 0.0))
    first = np.array([m[0, 1], mu - m[0, 0]])
    second = np.array([mu - m[1, 1], m[1, 0]])
    vector = first if np.linalg.norm(first) >= np.linalg.norm(second) else second
    if np.linalg.norm(vector) == 0.0:
        vector = np.array([1.0, 0.0])
    return mu, vector / np.linalg.norm(vector)


def riccati_periodic(
    p: PeriodicPotential, c: float, lam0: float | None = None
) -> NDArray[np.float64] | None:
    """π-periodic solution of c f′ − f² + c²p + 1 = 0, or None when |c| > c_max.

    f = −c y′/y for the decaying Floquet solution y at λ = −1/c². The Riccati
    equation is integrated for f itself, backwards over two periods: in that
    direction the decaying branch attracts every other solution.

    Raises:
        DomainError: If c is zero.
        ValidationFailure: If the constructed f fails the Riccati residual.
    """
    if c == 0:
        raise DomainError("c must be nonzero")
    if lam0 is None:
        lam0 = lambda0(p)
    lam = -1.0 / c**2
    if lam > lam0:
        logger.debug("No periodic Riccati solution", extra={"c": c, "lambda0": lam0})
        return None

    _, vector = _decaying_eigenvector(floquet(p, lam))
    if abs(vector[0]) < 1e-12:
        raise ValidationFailure("decaying Floquet solution vanishes at t = 0")
    start = -c * vector[1] / vector[0]

    def rhs(t: float, state: NDArray) -> NDArray:
        return (state**2 - c**2 * p(t) - 1.0) / c

    solution = solve_ivp(
        rhs,
        (2.0 * PERIOD, 0.0),
        np.array([start]),
        method="DOP853",
        t_eval=p.t[::-1],
        rtol=HILL_TOLERANCE,
        atol=HILL_TOLERANCE,
    )
    if not solution.success:
        raise IntegrationError(f"Riccati integration failed: {solution.message}")
    f = solution.y[0, ::-1]
    if not np.all(np.isfinite(f)):
        raise ValidationFailure("Riccati solution is not finite")

    residual = riccati_residual(p, f, c)
    scale = 1.0 + float(np.max(f**2))
    if residual > 1e-8 * scale:
        raise ValidationFailure(f"Riccati residual {residual:.3e} exceeds tolerance")
    logger.debug("Built periodic Riccati solution", extra={"c": c, "residual": residual})
    return f


def riccati_residual(p: PeriodicPotential, f: NDArray, c: float) -> float:
    f_prime = spectral.derivative(f, PERIOD)
    return float(np.max(np.abs(c * f_prime - f**2 + c**2 * p.samples + 1.0)))


def _full_period(values: NDArray, size: int) -> NDArray:
    values = np.asarray(values, dtype=float)
    if values.shape[0] == size:
        return values
    if 2 * values.shape[0] == size:
        return np.concatenate([values, values])
    raise DomainError("f samples do not match the curve grid")


def c_related(gamma: CentroaffineCurve, f: NDArray, c: float) -> CentroaffineCurve:
    """δ = fγ + cγ′ for a Riccati solution f.

    Raises:
        InconsistentCurveError: If [δ, δ′] ≠ 1 or [γ, δ] ≠ c.
    """
    f = _full_period(f, gamma.size)
    half = gamma.size // 2
    delta_half = f[:half, None] * gamma.samples[:half] + c * gamma.derivative()[:half]
    delta = CentroaffineCurve.from_half(delta_half)
    wronskian = delta.wronskian_residual()
    relation = float(np.max(np.abs(bracket(gamma.samples, delta.samples) - c)))
    if wronskian > 1e-8 or relation > 1e-8:
        logger.error(
            "c-related curve failed its checks",
            extra={"c": c, "wronskian": wronskian, "relation": relation},
        )
        raise InconsistentCurveError(
            f"c-related curve residuals: Wronskian {wronskian:.3e}, relation {relation:.3e}"
        )
    return delta


@dataclass(frozen=True)
class MiddleCurve:
    samples: NDArray[np.float64]
    alignment_residual: float
    cusps: NDArray[np.int64]


def middle_curve(
    gamma: CentroaffineCurve, delta: CentroaffineCurve | NDArray, cusp_tolerance: float = 1e-6
) -> MiddleCurve:
    """Γ = (γ + δ)/2, whose velocity is parallel to the chord δ − γ.

    ``delta`` may be a second curve or the samples of a shift of γ.
    """
    other = delta.samples if isinstance(delta, CentroaffineCurve) else np.asarray(delta)
    middle = 0.5 * (gamma.samples + other)
    if gamma.closed:
        velocity = spectral.derivative(middle, 2.0 * np.pi)
    else:
        velocity = np.gradient(middle, gamma.dt, axis=0, edge_order=2)
    chord = other - gamma.samples
    alignment = float(np.max(np.abs(bracket(velocity, chord))))
    if alignment > 1e-6:
        raise InconsistentCurveError(f"middle curve is not tangent to the chords ({alignment:.3e})")
    cusps = np.nonzero(np.abs(bracket(middle, velocity)) < cusp_tolerance)[0]
    if cusps.size:
        logger.info("Middle curve has cusps", extra={"count": int(cusps.size)})
    return MiddleCurve(samples=middle, alignment_residual=alignment, cusps=cusps)


def _dealias_mask(k: NDArray) -> NDArray:
    return np.abs(k) < (2.0 / 3.0) * np.max(np.abs(k))


def _ifrk4(values: NDArray, dt: float, flux) -> NDArray:
    """One integrating-factor RK4 step of u_t = −½u‴ + ∂ₜ flux(u) on period π."""
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    k = spectral.wavenumbers(n, PERIOD)
    mask = _dealias_mask(k)
    linear = 0.5j * k**3
    half = np.exp(0.5 * dt * linear)
    full = half * half

    def nonlinear(v_hat: NDArray) -> NDArray:
        u = np.real(fft.ifft(v_hat))
        return dt * 1j * k * mask * fft.fft(flux(u))

    v = fft.fft(values)
    a = nonlinear(v)
    b = nonlinear(half * (v + 0.5 * a))
    c = nonlinear(half * v + 0.5 * b)
    d = nonlinear(full * v + half * c)
    updated = np.real(fft.ifft(full * v + (full * a + 2.0 * half * (b + c) + d) / 6.0))

    bound = 1e6 * (1.0 + float(np.max(np.abs(values))))
    if not np.all(np.isfinite(updated)) or np.max(np.abs(updated)) > bound:
        raise StepError("blow-up detected in spectral step")
    return updated


def kdv_step(p: PeriodicPotential, dt: float) -> PeriodicPotential:
    """One step of ṗ = −½p‴ + 3p′p."""
    return PeriodicPotential(_ifrk4(p.samples, dt, lambda u: 1.5 * u**2))


def mkdv_step(f: NDArray, c: float, dt: float) -> NDArray[np.float64]:
    """One step of ḟ = −½f‴ + (3/c²)(f² − 1)f′."""
    if c == 0:
        raise DomainError("c must be nonzero")
    return _ifrk4(f, dt, lambda u: (u**3 - 3.0 * u) / c**2)


def miura_series(p: PeriodicPotential, order: int) -> list[NDArray[np.float64]]:
    """Coefficients of c², …, c^order in the expansion f = 1 + Σ f_j c^j.

    Raises:
        UnsupportedError: For order above six.
    """
    if order > MAX_MIURA_ORDER:
        raise UnsupportedError(f"Miura expansion is only provided through c^{MAX_MIURA_ORDER}")
    if order < 2:
        raise DomainError("order must be at least 2")
    terms: dict[int, NDArray] = {2: 0.5 * p.samples}
    for j in range(3, order + 1):
        quadratic = sum(
            (terms[i] * terms[j - i] for i in range(2, j - 1)), np.zeros(p.grid_size)
        )
        terms[j] = 0.5 * (spectral.derivative(terms[j - 1], PERIOD) - quadratic)
    return [terms[j] for j in range(2, order + 1)]


def kdv_vector_field(curve: CentroaffineCurve, f: NDArray) -> NDArray[np.float64]:
    """V_f = fγ′ − ½f′γ, tangent to curves with unit Wronskian."""
    f = _full_period(f, curve.size)
    f_prime = spectral.derivative(f, 2.0 * np.pi)
    return f[:, None] * curve.derivative() - 0.5 * f_prime[:, None] * curve.samples


def curve_flow(curve: CentroaffineCurve, duration: float, size: int = 128) -> CentroaffineCurve:
    """Evolve a closed curve along V_p with p its own curvature.

    The curve is resampled to ``size`` points; the implicit Radau method copes
    with the dispersive stiffness of the third derivative.
    """
    if not curve.closed:
        raise DomainError("curve_flow needs a closed curve")
    stride = curve.size // size
    if stride < 1 or curve.size % size:
        raise DomainError("size must divide the curve grid")
    start = curve.samples[::stride]

    def rhs(_t: float, flat: NDArray) -> NDArray:
        gamma = flat.reshape(size, 2)
        d1 = spectral.derivative(gamma, 2.0 * np.pi)
        d2 = spectral.derivative(gamma, 2.0 * np.pi, 2)
        p = bracket(d2, d1)
        p_prime = spectral.derivative(p, 2.0 * np.pi)
        return (p[:, None] * d1 - 0.5 * p_prime[:, None] * gamma).ravel()

    solution = solve_ivp(rhs, (0.0, duration), start.ravel(), method="Radau", rtol=1e-10,
                         atol=1e-12)
    if not solution.success:
        raise IntegrationError(f"curve flow failed: {solution.message}")
    final = solution.y[:, -1].reshape(size, 2)
    result = CentroaffineCurve.from_half(final[: size // 2])
    drift = result.wronskian_residual()
    logger.debug("Evolved curve along its KdV field", extra={"duration": duration, "drift": drift})
    return result


@dataclass(frozen=True)
class TravelingWaveFit:
    """Coefficients of (p′)² = 2p³ + a p² + 2b p + c and the fit residual."""

    a: float
    b: float
    c: float
    residual: float


def traveling_wave_fit(p: PeriodicPotential) -> TravelingWaveFit:
    p_prime = p.derivative()
    design = np.column_stack([p.samples**2, 2.0 * p.samples, np.ones(p.grid_size)])
    target = p_prime**2 - 2.0 * p.samples**3
    solution, *_ = np.linalg.lstsq(design, target, rcond=None)
    residual = float(np.max(np.abs(design @ solution - target)))
    return TravelingWaveFit(*(float(x) for x in solution), residual=residual)
