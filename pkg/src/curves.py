"""Centroaffine curves: the core sampled type and explicit constructions."""

import logging
from collections.abc import Callable
from dataclasses import dataclass, field
try:
    from enum import StrEnum
except ImportError:  # Python < 3.11
    from enum import Enum

    class StrEnum(str, Enum):
        __str__ = str.__str__
        __format__ = str.__format__

        @staticmethod
        def _generate_next_value_(name, start, count, last_values):
            return name.lower()

import numpy as np
from numpy.typing import NDArray
from scipy.integrate import solve_ivp
from scipy.optimize import brentq, least_squares

from src import spectral
from src.errors import (
    DegeneracyError,
    DomainError,
    InconsistentCurveError,
    IntegrationError,
    ValidationFailure,
)

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi
WRONSKIAN_TOLERANCE = 1e-8
OPEN_WRONSKIAN_TOLERANCE = 1e-4
POLE_CLEARANCE = 1e-2
ROOT_NODES_PER_PI = 10_000
ROOT_XTOL = 1e-12


def bracket(u: NDArray, v: NDArray) -> NDArray:
    """Determinant [u, v] of plane vectors, broadcast over leading axes."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]


def _is_power_of_two(n: int) -> bool:
    return n > 0 and not n & (n - 1)


@dataclass(frozen=True)
class CentroaffineCurve:
    """Sampled plane curve with unit Wronskian [γ, γ′] = 1.

    Closed curves live on the grid t_j = 2πj/N and are π-anti-periodic;
    open arcs carry their own ``t0`` and ``dt``. Constructions that know the
    velocity or the curvature exactly may attach them.
    """

    samples: NDArray[np.float64]
    closed: bool = True
    t0: float = 0.0
    dt: float = 0.0
    velocity: NDArray[np.float64] | None = field(default=None, repr=False, compare=False)
    curvature: NDArray[np.float64] | None = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=float)
        if samples.ndim != 2 or samples.shape[1] != 2:
            raise InconsistentCurveError("samples must have shape (N, 2)")
        if not np.all(np.isfinite(samples)):
            raise InconsistentCurveError("samples must be finite")
        object.__setattr__(self, "samples", samples)
        if self.closed:
            n = samples.shape[0]
            if not _is_power_of_two(n):
                raise InconsistentCurveError("closed curves need a power-of-two grid")
            object.__setattr__(self, "t0", 0.0)
            object.__setattr__(self, "dt", TWO_PI / n)
        elif self.dt <= 0:
            raise InconsistentCurveError("open arcs need a positive dt")

    @classmethod
    def from_half(cls, half: NDArray[np.float64], **kwargs) -> "CentroaffineCurve":
        """Closed curve from samples over [0, π); the rest follows from γ(t+π) = −γ(t)."""
        half = np.asarray(half, dtype=float)
        return cls(samples=np.concatenate([half, -half]), closed=True, **kwargs)

    @classmethod
    def from_complex(cls, z: NDArray[np.complex128], **kwargs) -> "CentroaffineCurve":
        z = np.asarray(z, dtype=complex)
        return cls(samples=np.column_stack([z.real, z.imag]), **kwargs)

    @property
    def size(self) -> int:
        return self.samples.shape[0]

    @property
    def t(self) -> NDArray[np.float64]:
        return self.t0 + self.dt * np.arange(self.size)

    def as_complex(self) -> NDArray[np.complex128]:
        return self.samples[:, 0] + 1j * self.samples[:, 1]

    def derivative(self, order: int = 1) -> NDArray[np.float64]:
        if self.closed:
            return spectral.derivative(self.samples, TWO_PI, order)
        if order == 1 and self.velocity is not None:
            return self.velocity
        result = self.samples
        if self.velocity is not None:
            result = self.velocity
            order -= 1
        for _ in range(order):
            result = np.gradient(result, self.dt, axis=0, edge_order=2)
        return result

    def wronskian(self) -> NDArray[np.float64]:
        return bracket(self.samples, self.derivative())

    def wronskian_residual(self) -> float:
        return float(np.max(np.abs(self.wronskian() - 1.0)))

    def antiperiodicity_residual(self) -> float:
        if not self.closed:
            return 0.0
        half = self.size // 2
        return float(np.max(np.abs(self.samples[half:] + self.samples[:half])))

    def validate(self, tolerance: float | None = None) -> None:
        """Check the unit-Wronskian and anti-periodicity invariants."""
        if tolerance is None:
            tolerance = WRONSKIAN_TOLERANCE if self.closed else OPEN_WRONSKIAN_TOLERANCE
        residual = self.wronskian_residual()
        if residual > tolerance:
            raise InconsistentCurveError(
                f"Wronskian deviates from 1 by {residual:.3e} (tolerance {tolerance:.1e})"
            )
        if self.antiperiodicity_residual() > 1e-12 * (1.0 + np.max(np.abs(self.samples))):
            raise InconsistentCurveError("closed curve is not π-anti-periodic")

    def shifted(self, alpha: float) -> NDArray[np.float64]:
        """Samples of γ(t + α) by trigonometric interpolation."""
        if not self.closed:
            raise DomainError("parameter shifts are only defined for closed curves")
        return spectral.shift(self.samples, TWO_PI, alpha)


@dataclass(frozen=True)
class SelfBacklundCertificate:
    alpha: float
    c: float
    residual: float

    @property
    def accepted(self) -> bool:
        return self.residual < 1e-6 * (1.0 + abs(self.c))


def verify_self_backlund(curve: CentroaffineCurve, alpha: float) -> SelfBacklundCertificate:
    """Measure how far [γ(t), γ(t+α)] is from a constant."""
    if not 0.0 < alpha < np.pi:
        raise DomainError("alpha must lie in (0, π)")
    determinants = bracket(curve.samples, curve.shifted(alpha))
    c = float(np.mean(determinants))
    residual = float(np.max(np.abs(determinants - c)))
    return SelfBacklundCertificate(alpha=float(alpha), c=c, residual=residual)


def star_shaped_curve(radius: Callable[[NDArray], NDArray], size: int = 1024) -> CentroaffineCurve:
    """Closed centroaffine curve through the polar graph r(θ)·(cos θ, sin θ).

    ``radius`` must be positive and π-periodic. The centroaffine parameter obeys
    dt/dθ ∝ r², normalized so that the anti-period is π.
    """
    if not _is_power_of_two(size) or size < 8:
        raise DomainError("size must be a power of two")
    fine = 4 * size
    theta = TWO_PI * np.arange(fine) / fine
    r = np.asarray(radius(theta), dtype=float)
    if np.any(r <= 0) or not np.all(np.isfinite(r)):
        raise DomainError("radius must be positive and finite")
    r2 = r**2

    # T(θ) = ∫₀^θ r² dθ, rescaled so T(π) = π
    total = spectral.periodic_antiderivative(r2, TWO_PI, np.array([np.pi]))[0]
    scale2 = np.pi / total

    targets = TWO_PI * np.arange(size // 2) / size
    guess = targets.copy()
    for _ in range(50):
        value = scale2 * spectral.periodic_antiderivative(r2, TWO_PI, guess) - targets
        slope = scale2 * spectral.evaluate(r2, TWO_PI, guess)
        step = value / slope
        guess = guess - step
        if np.max(np.abs(step)) < 1e-15:
            break
    radii = spectral.evaluate(r, TWO_PI, guess)
    half = np.sqrt(scale2) * radii[:, None] * np.column_stack([np.cos(guess), np.sin(guess)])
    curve = CentroaffineCurve.from_half(half)
    curve.validate()
    return curve


def circle(size: int = 1024) -> CentroaffineCurve:
    t = TWO_PI * np.arange(size // 2) / size
    return CentroaffineCurve.from_half(np.column_stack([np.cos(t), np.sin(t)]))


class ConicBranch(StrEnum):
    TAN = "tan"
    TANH = "tanh"
    COTH = "coth"
    ONE_OVER_T = "one_over_t"
    LINE = "line"


def _branch_amplitude(c: float, branch: ConicBranch) -> float:
    if branch is ConicBranch.TAN:
        if not c > 1:
            raise DomainError("the tan branch needs c > 1")
        return float(np.sqrt(c**2 - 1.0))
    if branch in (ConicBranch.TANH, ConicBranch.COTH):
        if not 0 < c < 1:
            raise DomainError("the tanh and coth branches need 0 < c < 1")
        return float(np.sqrt(1.0 - c**2))
    if branch is ConicBranch.ONE_OVER_T:
        if c != 1:
            raise DomainError("the 1/t branch needs c = 1")
        return 1.0
    if not c > 0:
        raise DomainError("the line branch needs c > 0")
    return 1.0


def branch_poles(c: float, branch: ConicBranch, t_range: tuple[float, float]) -> list[float]:
    """Poles of f inside the closed interval."""
    lo, hi = t_range
    if branch is ConicBranch.TAN:
        a = _branch_amplitude(c, branch)
        spacing = np.pi * c / a
        first = np.ceil((lo - 0.5 * spacing) / spacing)
        last = np.floor((hi - 0.5 * spacing) / spacing)
        return [float((j + 0.5) * spacing) for j in np.arange(first, last + 1)]
    if branch in (ConicBranch.COTH, ConicBranch.ONE_OVER_T) and lo <= 0.0 <= hi:
        return [0.0]
    return []


def _riccati_branch(
    c: float, branch: ConicBranch, t: NDArray
) -> tuple[NDArray, NDArray]:
    a = _branch_amplitude(c, branch)
    x = a * t / c
    if branch is ConicBranch.TAN:
        return a * np.tan(x), a**2 / c / np.cos(x) ** 2
    if branch is ConicBranch.TANH:
        return -a * np.tanh(x), -(a**2) / c / np.cosh(x) ** 2
    if branch is ConicBranch.COTH:
        return -a / np.tanh(x), a**2 / c / np.sinh(x) ** 2
    if branch is ConicBranch.ONE_OVER_T:
        return -1.0 / t, 1.0 / t**2
    return -np.tanh(t / c), -1.0 / c / np.cosh(t / c) ** 2


def _conic_frame(branch: ConicBranch, t: NDArray) -> tuple[NDArray, NDArray, NDArray]:
    """γ, γ′ and the curvature p of the base conic (circle, or the line (t, −1))."""
    if branch is ConicBranch.LINE:
        gamma = np.column_stack([t, -np.ones_like(t)])
        velocity = np.column_stack([np.ones_like(t), np.zeros_like(t)])
        return gamma, velocity, np.zeros_like(t)
    gamma = np.column_stack([np.cos(t), np.sin(t)])
    velocity = np.column_stack([-np.sin(t), np.cos(t)])
    return gamma, velocity, -np.ones_like(t)


def conic_point(c: float, branch: ConicBranch, t: NDArray) -> tuple[NDArray, NDArray]:
    """δ(t) = fγ + cγ′ and its velocity for a conic-related family."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    f, f_prime = _riccati_branch(c, branch, t)
    gamma, gamma_prime, p = _conic_frame(branch, t)
    delta = f[:, None] * gamma + c * gamma_prime
    delta_prime = f_prime[:, None] * gamma + f[:, None] * gamma_prime + (c * p)[:, None] * gamma
    return delta, delta_prime


def conic_related(
    c: float, branch: ConicBranch | str, t_range: tuple[float, float], size: int = 1024
) -> CentroaffineCurve:
    """Open arc of the curve c-related to the unit circle (or to the line) along branch f.

    Raises:
        DomainError: If c is outside the branch range or a pole of f lies
            within the clearance of the interval.
    """
    branch = ConicBranch(branch)
    lo, hi = t_range
    if not hi > lo:
        raise DomainError("t_range must be increasing")
    poles = branch_poles(c, branch, (lo - POLE_CLEARANCE, hi + POLE_CLEARANCE))
    if poles:
        raise DomainError(f"t_range {t_range} reaches poles of f at {poles}")

    t = np.linspace(lo, hi, size)
    delta, delta_prime = conic_point(c, branch, t)
    residual = float(np.max(np.abs(bracket(delta, delta_prime) - 1.0)))
    if residual > WRONSKIAN_TOLERANCE:
        raise InconsistentCurveError(f"conic-related arc has Wronskian residual {residual:.3e}")
    return CentroaffineCurve(
        samples=delta, closed=False, t0=lo, dt=float(t[1] - t[0]), velocity=delta_prime
    )


def conic_shift_determinant(
    c: float, branch: ConicBranch | str, alpha: float, t: NDArray
) -> NDArray[np.float64]:
    """[δ(t), δ(t+α)] evaluated from the closed-form branch."""
    branch = ConicBranch(branch)
    first, _ = conic_point(c, branch, t)
    second, _ = conic_point(c, branch, np.asarray(t) + alpha)
    return bracket(first, second)


class RotationEquation(StrEnum):
    TAN_TAN = "tan_tan"
    TANH_TAN = "tanh_tan"
    COTH_TAN = "coth_tan"


def _rotation_residual(kind: RotationEquation, u: float, alpha: NDArray) -> NDArray:
    # pole-free forms of tan(uα) = u tanα, tanh(uα) = u tanα, coth(uα) = u tanα
    if kind is RotationEquation.TAN_TAN:
        return np.sin(u * alpha) * np.cos(alpha) - u * np.cos(u * alpha) * np.sin(alpha)
    if kind is RotationEquation.TANH_TAN:
        return np.tanh(u * alpha) * np.cos(alpha) - u * np.sin(alpha)
    return np.cos(alpha) - u * np.tanh(u * alpha) * np.sin(alpha)


def _rotation_curve(kind: RotationEquation, u: float) -> tuple[float, ConicBranch]:
    if kind is RotationEquation.TAN_TAN:
        return 1.0 / np.sqrt(1.0 - u**2), ConicBranch.TAN
    if kind is RotationEquation.TANH_TAN:
        return 1.0 / np.sqrt(1.0 + u**2), ConicBranch.TANH
    return 1.0 / np.sqrt(1.0 + u**2), ConicBranch.COTH


def scan_roots(
    func: Callable[[NDArray], NDArray],
    lo: float,
    hi: float,
    nodes_per_pi: int = ROOT_NODES_PER_PI,
) -> list[float]:
    """Roots of a continuous function on (lo, hi) by sign-change scan and brentq."""
    count = max(16, int(np.ceil(nodes_per_pi * (hi - lo) / np.pi)))
    grid = np.linspace(lo, hi, count + 1)[1:-1]
    values = func(grid)
    roots = []
    for i in np.nonzero(values == 0.0)[0]:
        roots.append(float(grid[i]))
    changes = np.nonzero(values[:-1] * values[1:] < 0)[0]
    for i in changes:
        roots.append(float(brentq(lambda x: float(func(np.array([x]))[0]), grid[i], grid[i + 1],
                                  xtol=ROOT_XTOL)))
    return sorted(roots)


def rotation_equation_roots(
    kind: RotationEquation | str, u: float, interval: tuple[float, float]
) -> list[float]:
    """Certified rotation numbers of the conic-related curves.

    Each root of the chosen equation is accepted only if the matching
    conic-related curve satisfies [δ(t), δ(t+α)] = sin α to 1e-8. Roots
    that fail the determinant test are discarded and logged.
    """
    kind = RotationEquation(kind)
    if not 0 < u < 1:
        raise DomainError("u must lie in (0, 1)")
    lo, hi = interval
    candidates = [
        alpha
        for alpha in scan_roots(lambda x: _rotation_residual(kind, u, x), lo, hi)
        if abs(np.sin(alpha)) > 1e-8
    ]
    c, branch = _rotation_curve(kind, u)
    certified = []
    for alpha in candidates:
        residual = _certify_conic_shift(c, branch, alpha)
        if residual < 1e-8:
            certified.append(alpha)
        else:
            logger.warning(
                "Discarded rotation root failing the determinant test",
                extra={"kind": kind.value, "u": u, "alpha": alpha, "residual": residual},
            )
    logger.info(
        "Solved rotation equation",
        extra={"kind": kind.value, "u": u, "candidates": len(candidates),
               "certified": len(certified)},
    )
    return certified


def _certify_conic_shift(c: float, branch: ConicBranch, alpha: float) -> float:
    t = np.linspace(0.3, 6.0, 64)
    if branch is ConicBranch.TAN:
        a = _branch_amplitude(c, branch)
        keep = (np.abs(np.cos(a * t / c)) > 0.1) & (np.abs(np.cos(a * (t + alpha) / c)) > 0.1)
        t = t[keep]
    elif branch is ConicBranch.COTH:
        t = t[np.abs(t + alpha) > 0.1]
    determinants = conic_shift_determinant(c, branch, alpha, t)
    return float(np.max(np.abs(determinants - np.sin(alpha))))


def infinitesimal_angles(k: int) -> list[float]:
    """Roots of tan(kα) = k·tanα in (0, π); α = π/2 counts for odd k."""
    if k < 2:
        raise DomainError("k must be at least 2")
    roots = scan_roots(
        lambda x: np.sin(k * x) * np.cos(x) - k * np.cos(k * x) * np.sin(x),
        1e-3,
        np.pi - 1e-3,
    )
    if len(roots) != k - 2:
        raise ValidationFailure(f"expected {k - 2} infinitesimal angles, found {len(roots)}")
    return roots


@dataclass(frozen=True)
class WegnerCurve:
    """Curve Γ = √R·(cos α, sin α) with R′² = aR³ + bR² + cR − 4."""

    curve: CentroaffineCurve
    a: float
    b: float
    c: float
    radius2: NDArray[np.float64]
    curvature_residual: float
    euclidean_residual: float

    @property
    def potential(self) -> NDArray[np.float64]:
        return 0.5 * self.a * self.radius2 + 0.25 * self.b


def wegner_curve(
    a: float, b: float, c: float, r0: float, t_max: float = TWO_PI, size: int = 2048
) -> WegnerCurve:
    """Integrate the Wegner-ansatz ODE and assemble the curve.

    Raises:
        DomainError: If the cubic is negative at ``r0`` or ``r0`` is not positive.
        IntegrationError: If the integrator fails.
        InconsistentCurveError: If the curvature identities are violated.
    """

    def cubic(r: float) -> float:
        return a * r**3 + b * r**2 + c * r - 4.0

    if r0 <= 0:
        raise DomainError("R0 must be positive")
    start = cubic(r0)
    if start < -1e-12:
        raise DomainError(f"cubic is negative at R0 ({start:.3e})")

    def rhs(_t: float, state: NDArray) -> NDArray:
        r, r_prime, _ = state
        return np.array([r_prime, 1.5 * a * r**2 + b * r + 0.5 * c, 1.0 / r])

    t = np.linspace(0.0, t_max, size)
    solution = solve_ivp(
        rhs,
        (0.0, t_max),
        np.array([r0, np.sqrt(max(start, 0.0)), 0.0]),
        method="DOP853",
        t_eval=t,
        rtol=1e-12,
        atol=1e-12,
    )
    if not solution.success:
        raise IntegrationError(f"Wegner ODE failed: {solution.message}")
    r, r_prime, angle = solution.y
    if np.any(r <= 0):
        raise IntegrationError("squared radius left the positive axis")

    root = np.sqrt(r)
    direction = np.column_stack([np.cos(angle), np.sin(angle)])
    normal = np.column_stack([-np.sin(angle), np.cos(angle)])
    samples = root[:, None] * direction
    velocity = (r_prime / (2.0 * root))[:, None] * direction + (1.0 / root)[:, None] * normal

    r_second = 1.5 * a * r**2 + b * r + 0.5 * c
    potential = r_second / (2.0 * r) - (r_prime**2 + 4.0) / (4.0 * r**2)
    expected = 0.5 * a * r + 0.25 * b
    curvature_residual = float(np.max(np.abs(potential - expected)))

    speed = np.hypot(velocity[:, 0], velocity[:, 1])
    euclidean = -potential / speed**3
    quadratic = a * r**2 + b * r + c
    euclidean_expected = -(4.0 * a * r + 2.0 * b) / quadratic**1.5
    euclidean_residual = float(np.max(np.abs(euclidean - euclidean_expected)))

    if curvature_residual > 1e-8 or euclidean_residual > 1e-6:
        raise InconsistentCurveError(
            "Wegner curvature identities violated",
        )
    curve = CentroaffineCurve(
        samples=samples,
        closed=False,
        t0=0.0,
        dt=float(t[1] - t[0]),
        velocity=velocity,
        curvature=expected,
    )
    logger.info(
        "Built Wegner curve",
        extra={"a": a, "b": b, "c": c, "R0": r0, "curvature_residual": curvature_residual},
    )
    return WegnerCurve(
        curve=curve,
        a=a,
        b=b,
        c=c,
        radius2=r,
        curvature_residual=curvature_residual,
        euclidean_residual=euclidean_residual,
    )


PairFunction = Callable[[NDArray, NDArray], float]


@dataclass(frozen=True)
class PeriodTwoResult:
    """Outcome of the period-two shooting; ``curve`` is None when shooting failed."""

    curve: CentroaffineCurve | None
    residual: float
    scale: float
    phase: float
    closing_time: float
    c: float
    radon_residual: float | None


def _rotation(phase: float) -> NDArray:
    return np.array([[np.cos(phase), -np.sin(phase)], [np.sin(phase), np.cos(phase)]])


def _check_odd(func: PairFunction, rng: np.random.Generator) -> None:
    for _ in range(5):
        p1, p2 = rng.normal(size=2), rng.normal(size=2)
        lhs = func(p2, -p1)
        rhs = -func(p1, p2)
        if abs(lhs - rhs) > 1e-9 * (1.0 + abs(rhs)):
            raise DomainError("f must satisfy f(P2, -P1) = -f(P1, P2)")


def _period_two_flow(
    func: PairFunction, c: float, scale: float, phase: float, duration: float, dense: bool
):
    rotation = _rotation(phase)

    def rhs(_t: float, state: NDArray) -> NDArray:
        p1, p2 = state[:2], state[2:]
        value = scale * func(rotation @ p1, rotation @ p2)
        v1 = value * p1 + p2 / c
        v2 = -p1 / c - value * p2
        return np.concatenate([v1, v2])

    return solve_ivp(
        rhs,
        (0.0, duration),
        np.array([1.0, 0.0, 0.0, c]),
        method="DOP853",
        rtol=1e-11,
        atol=1e-12,
        dense_output=dense,
    )


def period_two_family(
    func: PairFunction, c: float, size: int = 1024, seed: int = 0
) -> PeriodTwoResult:
    """Shoot for a self-Bäcklund curve with rotation number π/2.

    The unknowns are a scale of f, a phase at which f is evaluated and the
    closing time T; the boundary conditions are P1(T) = (0, c), P2(T) = (−1, 0).
    The traced curve is rescaled so that T becomes π/2.
    """
    if c == 0:
        raise DomainError("c must be nonzero")
    _check_odd(func, np.random.default_rng(seed))
    target = np.array([0.0, c, -1.0, 0.0])

    def residual(params: NDArray) -> NDArray:
        scale, phase, duration = params
        if duration <= 0:
            return np.full(4, 1e3)
        solution = _period_two_flow(func, c, scale, phase, duration, dense=False)
        if not solution.success:
            return np.full(4, 1e3)
        return solution.y[:, -1] - target

    fit = least_squares(
        residual, x0=np.array([1.0, 0.0, 0.5 * np.pi * abs(c)]), method="lm", xtol=1e-14,
        ftol=1e-14,
    )
    scale, phase, duration = (float(x) for x in fit.x)
    shooting_residual = float(np.max(np.abs(fit.fun)))
    rescaled_c = c * np.pi / (2.0 * duration)
    logger.info(
        "Period-two shooting finished",
        extra={"residual": shooting_residual, "scale": scale, "phase": phase, "T": duration},
    )
    if shooting_residual > 1e-6 or duration <= 0:
        return PeriodTwoResult(None, shooting_residual, scale, phase, duration, rescaled_c, None)

    solution = _period_two_flow(func, c, scale, phase, duration, dense=True)
    quarter = size // 4
    local = np.arange(quarter) * duration / quarter
    states = solution.sol(local).T
    p1, p2 = states[:, :2], states[:, 2:]
    conserved = np.max(np.abs(bracket(p1, p2) - c))
    if conserved > 1e-8 * (1.0 + abs(c)):
        raise IntegrationError(f"[P1, P2] drifted by {conserved:.3e}")

    # [P1, P1′] = 1 in flow time; t = πs/(2T) scales the Wronskian by 2T/π
    amplitude = np.sqrt(np.pi / (2.0 * duration))
    curve = CentroaffineCurve.from_half(amplitude * np.concatenate([p1, p2]))
    curve.validate(tolerance=1e-6)

    middle = 0.5 * (curve.samples + curve.shifted(0.5 * np.pi))
    middle_prime = spectral.derivative(middle, TWO_PI)
    ahead = spectral.shift(middle, TWO_PI, 0.5 * np.pi)
    norms = np.linalg.norm(middle_prime, axis=1) * np.linalg.norm(ahead, axis=1)
    radon = float(np.max(np.abs(bracket(middle_prime, ahead)) / norms))
    return PeriodTwoResult(curve, shooting_residual, scale, phase, duration, rescaled_c, radon)


def bianchi_fourth(
    gamma: CentroaffineCurve,
    delta: CentroaffineCurve,
    big_gamma: CentroaffineCurve,
    b: float,
    c: float,
) -> CentroaffineCurve:
    """Fourth curve Δ = (cδ − bΓ)/[Γ, δ] of the Bianchi permutability square.

    Raises:
        DegeneracyError: If [Γ, δ] vanishes somewhere.
        InconsistentCurveError: If the input relations or the output checks fail.
    """
    for name, other, value in (("delta", delta, c), ("Gamma", big_gamma, b)):
        drift = np.max(np.abs(bracket(gamma.samples, other.samples) - value))
        if drift > 1e-7 * (1.0 + abs(value)):
            raise InconsistentCurveError(f"[gamma, {name}] is not constant ({drift:.3e})")
    cross = bracket(big_gamma.samples, delta.samples)
    if np.min(np.abs(cross)) < 1e-10:
        raise DegeneracyError("[Gamma, delta] vanishes")
    samples = (c * delta.samples - b * big_gamma.samples) / cross[:, None]
    result = CentroaffineCurve(samples=samples, closed=gamma.closed, t0=gamma.t0, dt=gamma.dt)
    checks = {
        "wronskian": result.wronskian_residual(),
        "delta": float(np.max(np.abs(bracket(delta.samples, samples) - b))),
        "Gamma": float(np.max(np.abs(bracket(big_gamma.samples, samples) - c))),
    }
    if max(checks.values()) > 1e-7:
        raise InconsistentCurveError(f"Bianchi quadruple fails its relations: {checks}")
    return result
