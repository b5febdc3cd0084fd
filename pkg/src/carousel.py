"""Carousels: the ξ field on centroaffine 2n-gons and its periodic orbits.

A centroaffine 2n-gon moves by Ṗ_i = V_i, where V_i = v_i P_i − P_{i−1} and
v_i + v_{i+1} = a_i. For odd n the v_i are unique (half the alternating sum of
the Hill coefficients starting at a_i). The field preserves the unit side
determinants and the three quadratic functions I, J, K, and it descends to the
dressing chain ȧ_i = a_i (v_{i+1} − v_i) on Hill coefficients.

For n = 5 the Hill coefficients are the frieze
(x, (y+1)/x, (x+1)/y, y, (x+y+1)/(xy)), the reduced flow is Hamiltonian with
H = Σ a_i, and a closed carousel is a level of H whose monodromy is the identity.
"""

import logging
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray
from scipy.integrate import solve_ivp
from scipy.optimize import brentq, minimize_scalar

from src.curves import CentroaffineCurve, SelfBacklundCertificate, bracket, verify_self_backlund
from src.errors import (
    AdmissibilityError,
    BracketError,
    ConstraintError,
    ConstructionError,
    DomainError,
    IntegrationError,
    MonodromyError,
    UnsupportedError,
    ValidationFailure,
)
from src.polygons import CentroaffinePolygon, from_hill, regular_polygon, symmetric_vertices

logger = logging.getLogger(__name__)

GOLDEN = (1.0 + np.sqrt(5.0)) / 2.0
CACHE_TOLERANCE = 1e-9
TANGENT_TOLERANCE = 1e-8
ADMISSIBILITY_TOLERANCE = 1e-10
PROJECTION_LIMIT = 1e-6
FIT_TOLERANCE = 1e-7
SHIFT_TOLERANCE = 1e-6
CERTIFICATE_TOLERANCE = 1e-5
SECTION_SKIP = 1e-6


def integrals(polygon: CentroaffinePolygon) -> tuple[float, float, float]:
    """I = Σ x_i x_{i+1}, J = Σ (x_i y_{i+1} + x_{i+1} y_i), K = Σ y_i y_{i+1} over i < n."""
    return _integrals(polygon.vertices[: polygon.n])


def _integrals(half: NDArray) -> tuple[float, float, float]:
    following = np.roll(symmetric_vertices(half), -1, axis=0)[: half.shape[0]]
    x, y = half[:, 0], half[:, 1]
    xn, yn = following[:, 0], following[:, 1]
    return float(np.sum(x * xn)), float(np.sum(x * yn + xn * y)), float(np.sum(y * yn))


def _hill(half: NDArray) -> NDArray:
    full = symmetric_vertices(half)
    n = half.shape[0]
    return bracket(np.roll(full, 1, axis=0), np.roll(full, -1, axis=0))[:n]


@dataclass(frozen=True)
class CarouselState:
    """A polygon on a carousel trajectory with its cached conserved quantities."""

    polygon: CentroaffinePolygon
    t: float
    I: float  # noqa: E741
    J: float
    K: float

    def __post_init__(self) -> None:
        recomputed = np.array(integrals(self.polygon))
        cached = np.array([self.I, self.J, self.K])
        if np.max(np.abs(recomputed - cached)) > CACHE_TOLERANCE * (1.0 + np.max(np.abs(cached))):
            raise ConstructionError("cached I, J, K do not match the polygon")

    @classmethod
    def at(cls, polygon: CentroaffinePolygon, t: float = 0.0) -> "CarouselState":
        I, J, K = integrals(polygon)  # noqa: E741
        return cls(polygon=polygon, t=float(t), I=I, J=J, K=K)

    @property
    def casimir(self) -> float:
        """J² − 4IK, which is invariant under SL₂."""
        return self.J**2 - 4.0 * self.I * self.K

    @property
    def hamiltonian(self) -> float:
        return float(np.sum(self.polygon.hill_coeffs))


def velocity_coefficients(a: NDArray) -> NDArray[np.float64]:
    """Solve v_i + v_{i+1} = a_i cyclically.

    For even n the alternating sum of a must vanish and the solution with
    Σ(−1)^i v_i = 0 is returned.
    """
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    if n % 2:
        signs = (-1.0) ** np.arange(n)
        return np.array([0.5 * np.sum(signs * np.roll(a, -i)) for i in range(n)])
    alternating = float(np.sum((-1.0) ** np.arange(n) * a))
    if abs(alternating) > ADMISSIBILITY_TOLERANCE * (1.0 + np.sum(np.abs(a))):
        raise AdmissibilityError(
            f"even-gon Hill coefficients need a vanishing alternating sum, got {alternating:.3e}"
        )
    system = np.eye(n) + np.roll(np.eye(n), 1, axis=1)
    v, *_ = np.linalg.lstsq(system, a, rcond=None)
    return v


def _velocity(half: NDArray) -> NDArray:
    v = velocity_coefficients(_hill(half))
    previous = np.roll(symmetric_vertices(half), 1, axis=0)[: half.shape[0]]
    return v[:, None] * half - previous


def xi(polygon: CentroaffinePolygon) -> NDArray[np.float64]:
    """The velocities V_0..V_{2n−1}, with V_{i+n} = −V_i."""
    return symmetric_vertices(_velocity(polygon.vertices[: polygon.n]))


def field_residual(polygon: CentroaffinePolygon, velocity: NDArray) -> float:
    """Largest violation of [P_i, V_i] = 1 and [V_i, P_{i+1}] + [P_i, V_{i+1}] = 0."""
    p = polygon.vertices
    v = np.asarray(velocity, dtype=float)
    unit = bracket(p, v) - 1.0
    sides = bracket(v, np.roll(p, -1, axis=0)) + bracket(p, np.roll(v, -1, axis=0))
    return float(max(np.max(np.abs(unit)), np.max(np.abs(sides))))


def constraint_jacobian(polygon: CentroaffinePolygon) -> NDArray[np.float64]:
    """Rows d[P_i, P_{i+1}] for i < n, acting on flattened half-vertex tangents."""
    n = polygon.n
    p = polygon.vertices
    jac = np.zeros((n, 2 * n))
    for i in range(n):
        nxt = p[i + 1]
        prev_side = p[i]
        jac[i, 2 * i] = nxt[1]
        jac[i, 2 * i + 1] = -nxt[0]
        # P_n = −P_0 flips the sign of the wrap-around column.
        j = (i + 1) % n
        sign = -1.0 if i + 1 == n else 1.0
        jac[i, 2 * j] += -sign * prev_side[1]
        jac[i, 2 * j + 1] += sign * prev_side[0]
    return jac


def tangent_residual(polygon: CentroaffinePolygon, w: NDArray) -> float:
    w = np.asarray(w, dtype=float).reshape(-1)
    return float(np.max(np.abs(constraint_jacobian(polygon) @ w)))


def tangent_projection(polygon: CentroaffinePolygon, w: NDArray) -> NDArray[np.float64]:
    """Orthogonal projection of a half-vertex vector onto the constraint tangent space."""
    w = np.asarray(w, dtype=float)
    jac = constraint_jacobian(polygon)
    flat = w.reshape(-1)
    correction = jac.T @ np.linalg.solve(jac @ jac.T, jac @ flat)
    return (flat - correction).reshape(w.shape)


def presymplectic(polygon: CentroaffinePolygon, u: NDArray, w: NDArray) -> float:
    """ω(u, w) with ω = Σ_{i<n} (dx_{i+1}∧dy_i + dx_i∧dy_{i+1}).

    Tangent vectors are given on the half-vertices P_0..P_{n−1}.
    """
    n = polygon.n
    u = np.asarray(u, dtype=float).reshape(n, 2)
    w = np.asarray(w, dtype=float).reshape(n, 2)
    scale = 1.0 + float(np.max(np.abs(u))) + float(np.max(np.abs(w)))
    for vector in (u, w):
        residual = tangent_residual(polygon, vector)
        if residual > TANGENT_TOLERANCE * scale:
            raise ConstraintError(f"vector is not tangent to the constraints ({residual:.3e})")
    uu, ww = symmetric_vertices(u), symmetric_vertices(w)
    un, wn = np.roll(uu, -1, axis=0)[:n], np.roll(ww, -1, axis=0)[:n]
    return float(
        np.sum(un[:, 0] * w[:, 1] - wn[:, 0] * u[:, 1])
        + np.sum(u[:, 0] * wn[:, 1] - w[:, 0] * un[:, 1])
    )


def differentials(polygon: CentroaffinePolygon) -> dict[str, NDArray[np.float64]]:
    """Gradients of I, J, K with respect to the half-vertices."""
    n = polygon.n
    full = polygon.vertices
    neighbours = (np.roll(full, -1, axis=0) + np.roll(full, 1, axis=0))[:n]
    zeros = np.zeros(n)
    return {
        "I": np.column_stack([neighbours[:, 0], zeros]),
        "J": np.column_stack([neighbours[:, 1], neighbours[:, 0]]),
        "K": np.column_stack([zeros, neighbours[:, 1]]),
    }


def generators(polygon: CentroaffinePolygon) -> dict[str, NDArray[np.float64]]:
    """The sl₂ fields e, h, f and ν = 2Ke + Jh − 2If on the half-vertices."""
    half = polygon.vertices[: polygon.n]
    x, y = half[:, 0], half[:, 1]
    e = np.column_stack([np.zeros_like(x), x])
    h = np.column_stack([x, -y])
    f = np.column_stack([y, np.zeros_like(y)])
    I, J, K = integrals(polygon)  # noqa: E741
    return {"e": e, "h": h, "f": f, "nu": 2.0 * K * e + J * h - 2.0 * I * f}


def nu_matrix(I: float, J: float, K: float) -> NDArray[np.float64]:  # noqa: E741
    """The sl₂ matrix of ν acting on points."""
    return np.array([[J, -2.0 * I], [2.0 * K, -J]])


def reduced_field(a: NDArray) -> NDArray[np.float64]:
    """ȧ_i = a_i (v_{i+1} − v_i), the image of ξ on Hill coefficients."""
    a = np.asarray(a, dtype=float)
    v = velocity_coefficients(a)
    return a * (np.roll(v, -1) - v)


def frieze5_hamiltonian(x: float, y: float) -> float:
    """H = x + y + (x+1)/y + (y+1)/x + (x+y+1)/(xy) on the positive quadrant."""
    if not (x > 0 and y > 0):
        raise DomainError("frieze coordinates must be positive")
    return x + y + (x + 1.0) / y + (y + 1.0) / x + (x + y + 1.0) / (x * y)


def frieze5_gradient(x: float, y: float) -> tuple[float, float]:
    if not (x > 0 and y > 0):
        raise DomainError("frieze coordinates must be positive")
    hx = 1.0 + 1.0 / y - y / x**2 - 2.0 / x**2 - 1.0 / (x**2 * y)
    hy = 1.0 + 1.0 / x - x / y**2 - 2.0 / y**2 - 1.0 / (x * y**2)
    return hx, hy


def frieze5_field(x: float, y: float) -> tuple[float, float]:
    """Hamiltonian field of H for the area form dx∧dy/(xy)."""
    hx, hy = frieze5_gradient(x, y)
    return x * y * hy, -x * y * hx


def frieze5_coefficients(x: float, y: float) -> NDArray[np.float64]:
    """Hill coefficients a_0..a_4 of the decagon with frieze coordinates (x, y)."""
    if not (x > 0 and y > 0):
        raise DomainError("frieze coordinates must be positive")
    return np.array([(x + y + 1.0) / (x * y), x, (y + 1.0) / x, (x + 1.0) / y, y])


def decagon_from_frieze(x: float, y: float) -> CentroaffinePolygon:
    """P_0 = (1,0), P_1 = (0,1), then P_{i+1} = a_i P_i − P_{i−1} through the frieze."""
    polygon = from_hill(frieze5_coefficients(x, y))
    if polygon is None:
        raise ConstructionError("frieze coefficients failed to close the decagon")
    return polygon


def frieze_coordinates(polygon: CentroaffinePolygon) -> tuple[float, float]:
    if polygon.n != 5:
        raise UnsupportedError("frieze coordinates are defined for decagons")
    a = polygon.hill_coeffs
    return float(a[1]), float(a[4])


def perturbed_polygon(n: int, amplitude: float, seed: int = 0) -> CentroaffinePolygon:
    """The regular 2n-gon moved along a random constraint-tangent direction (n odd)."""
    if n % 2 == 0 or n < 3:
        raise UnsupportedError("perturbed polygons are built for odd n only")
    base = regular_polygon(n)
    rng = np.random.default_rng(seed)
    direction = tangent_projection(base, rng.standard_normal((n, 2)))
    half, _ = _project(base.vertices[:n] + amplitude * direction)
    return CentroaffinePolygon(symmetric_vertices(half))


def _rhs(_t: float, state: NDArray, n: int) -> NDArray:
    return _velocity(state.reshape(n, 2)).ravel()


def _project(half: NDArray) -> tuple[NDArray, float]:
    """Rescale P_i ↦ s_i P_i so that every [P_i, P_{i+1}] is 1 again (n odd)."""
    n = half.shape[0]
    full = symmetric_vertices(half)
    sides = bracket(full, np.roll(full, -1, axis=0))[:n]
    if np.any(sides <= 0):
        raise IntegrationError("a side determinant changed sign during integration")
    system = np.eye(n) + np.roll(np.eye(n), 1, axis=1)
    log_scale = np.linalg.solve(system, -np.log(sides))
    return half * np.exp(log_scale)[:, None], float(np.max(np.abs(log_scale)))


@dataclass(frozen=True)
class CarouselTrajectory:
    states: tuple[CarouselState, ...]
    tol: float
    max_correction: float

    @property
    def times(self) -> NDArray[np.float64]:
        return np.array([s.t for s in self.states])

    def integral_series(self) -> NDArray[np.float64]:
        """Columns I, J, K, H."""
        return np.array([[s.I, s.J, s.K, s.hamiltonian] for s in self.states])

    def vertex_series(self) -> NDArray[np.float64]:
        """Shape (len, n, 2): the half-vertices along the trajectory."""
        return np.array([s.polygon.vertices[: s.polygon.n] for s in self.states])


def flow(
    state: CarouselState, duration: float, tol: float = 1e-9, samples: int = 200
) -> CarouselTrajectory:
    """Integrate ξ for the given time, projecting back onto the constraints at each sample."""
    n = state.polygon.n
    if n % 2 == 0:
        raise UnsupportedError("carousel flows are integrated for odd n only")
    if duration <= 0 or samples < 1:
        raise DomainError("duration and samples must be positive")
    times = np.linspace(state.t, state.t + duration, samples + 1)
    current = state.polygon.vertices[:n].ravel()
    states = [state]
    worst = 0.0
    reference = np.array([state.I, state.J, state.K])
    for start, stop in zip(times[:-1], times[1:]):
        sol = solve_ivp(_rhs, (start, stop), current, method="DOP853", args=(n,),
                        rtol=0.01 * tol, atol=0.01 * tol)
        if not sol.success:
            logger.error("Carousel integration failed", extra={"t": float(start),
                                                                "error": sol.message})
            raise IntegrationError(sol.message)
        half, correction = _project(sol.y[:, -1].reshape(n, 2))
        if correction > PROJECTION_LIMIT:
            raise IntegrationError(f"constraint projection of {correction:.3e} exceeds the limit")
        worst = max(worst, correction)
        current = half.ravel()
        next_state = CarouselState.at(CentroaffinePolygon(symmetric_vertices(half)), stop)
        drift = float(np.max(np.abs(np.array([next_state.I, next_state.J, next_state.K])
                                    - reference)))
        if drift > 10.0 * tol:
            logger.error("Conserved quantities drifted",
                         extra={"t": float(stop), "drift": drift, "tol": tol})
            raise IntegrationError(f"I, J, K drifted by {drift:.3e} at t={stop:.6g}")
        states.append(next_state)
    logger.debug("Carousel flow finished",
                 extra={"n": n, "duration": duration, "max_correction": worst})
    return CarouselTrajectory(states=tuple(states), tol=tol, max_correction=worst)


def _sl2_fit(source: NDArray, target: NDArray) -> tuple[NDArray, float]:
    """Least-squares A with A·source_i ≈ target_i, projected to det A = 1."""
    transposed, *_ = np.linalg.lstsq(source, target, rcond=None)
    residual = float(np.max(np.abs(source @ transposed - target)))
    matrix = transposed.T
    det = float(np.linalg.det(matrix))
    if det <= 0:
        raise MonodromyError(f"fitted monodromy has non-positive determinant {det:.3e}")
    return matrix / np.sqrt(det), residual


def rotation_angle(matrix: NDArray) -> float:
    """Signed rotation angle of an elliptic SL₂ matrix."""
    half_trace = 0.5 * float(np.trace(matrix))
    if abs(half_trace) >= 1.0:
        raise MonodromyError(f"matrix with trace {2 * half_trace:.6g} is not elliptic")
    return float(np.arctan2(np.sign(matrix[1, 0]) * np.sqrt(1.0 - half_trace**2), half_trace))


@dataclass(frozen=True)
class Monodromy:
    """A with A(T(φ_t P)) = φ_{t+t₀}(P) for the cyclic shift T(P_i) = P_{i+1}."""

    matrix: NDArray[np.float64]
    trace: float
    angle: float
    shift_time: float
    reduced_period: float | None
    fit_residual: float
    generator_residual: float
    section: dict = field(default_factory=dict)


@dataclass
class _Piecewise:
    """Dense output glued from consecutive solve_ivp windows."""

    pieces: list = field(default_factory=list)

    def __call__(self, t: float) -> NDArray:
        for start, stop, sol in self.pieces:
            if start <= t <= stop:
                return sol(t)
        raise MonodromyError(f"time {t:.6g} is outside the integrated range")


def monodromy(
    polygon: CentroaffinePolygon, tol: float = 1e-10, max_time: float = 200.0, window: float = 5.0
) -> Monodromy:
    """Monodromy of a decagon's carousel with respect to the shift by one vertex.

    The reduced period is the first return to the section {a_4 = a_4(0)}
    crossed in the direction of ȧ_4(0). The shift time t₀ is the first time in
    that period at which the Hill coefficients equal (a_{i+1}(0))_i.
    """
    n = polygon.n
    if n != 5:
        raise UnsupportedError("monodromy is computed for decagons only")
    half0 = polygon.vertices[:n]
    shifted = np.roll(polygon.vertices, -1, axis=0)
    I, J, K = integrals(polygon)  # noqa: E741
    generator = nu_matrix(I, J, K)
    a0 = polygon.hill_coeffs

    if polygon.is_regular(1e-9):
        matrix, residual = _sl2_fit(shifted, polygon.vertices)
        return _monodromy_result(matrix, 0.0, None, residual, generator,
                                 {"shift": 1, "regular": True})

    section_value = float(a0[4])
    slope = float(reduced_field(a0)[4])
    if abs(slope) < 1e-12:
        raise MonodromyError("the starting point is tangent to the Poincaré section")
    direction = float(np.sign(slope))

    def crossing(_t: float, state: NDArray, _n: int) -> float:
        return float(_hill(state.reshape(n, 2))[4] - section_value)

    crossing.direction = direction

    dense = _Piecewise()
    current = half0.ravel()
    start = 0.0
    period = None
    while start < max_time:
        stop = min(start + window, max_time)
        sol = solve_ivp(_rhs, (start, stop), current, method="DOP853", args=(n,),
                        rtol=0.01 * tol, atol=0.01 * tol, dense_output=True, events=crossing)
        if not sol.success:
            raise IntegrationError(sol.message)
        dense.pieces.append((start, stop, sol.sol))
        hits = [float(t) for t in sol.t_events[0] if t > SECTION_SKIP]
        if hits:
            period = hits[0]
            break
        current = sol.y[:, -1]
        start = stop
    if period is None:
        logger.error("No return to the Poincaré section", extra={"max_time": max_time})
        raise MonodromyError(f"no return to the section within t={max_time}")

    target = np.roll(a0, -1)

    def distance(t: float) -> float:
        return float(np.linalg.norm(_hill(dense(t).reshape(n, 2)) - target))

    grid = np.linspace(0.0, period, 513)[1:]
    values = np.array([distance(t) for t in grid])
    idx = int(np.argmin(values))
    lo = grid[max(idx - 1, 0)] if idx > 0 else 0.0
    hi = grid[min(idx + 1, grid.size - 1)]
    refined = minimize_scalar(distance, bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-13})
    shift_time = float(refined.x)
    gap = distance(shift_time)
    if gap > SHIFT_TOLERANCE * (1.0 + np.max(np.abs(a0))):
        logger.error("Shifted polygon not found on the orbit",
                     extra={"gap": gap, "period": period})
        raise MonodromyError(f"shifted Hill coefficients missed by {gap:.3e}")

    flowed = symmetric_vertices(dense(shift_time).reshape(n, 2))
    matrix, residual = _sl2_fit(shifted, flowed)
    if residual > FIT_TOLERANCE * (1.0 + np.max(np.abs(flowed))):
        raise MonodromyError(f"SL₂ fit residual {residual:.3e} is too large")
    section = {"coordinate": "a_4", "value": section_value, "direction": direction,
               "shift": 1, "regular": False}
    return _monodromy_result(matrix, shift_time, period, residual, generator, section)


def _monodromy_result(
    matrix: NDArray, shift_time: float, period: float | None, residual: float,
    generator: NDArray, section: dict,
) -> Monodromy:
    angle = rotation_angle(matrix)
    commutator = matrix @ generator - generator @ matrix
    generator_residual = float(np.max(np.abs(commutator)) / (1.0 + np.max(np.abs(generator))))
    logger.debug("Monodromy extracted",
                 extra={"trace": float(np.trace(matrix)), "angle": angle,
                        "shift_time": shift_time, "period": period})
    return Monodromy(
        matrix=matrix,
        trace=float(np.trace(matrix)),
        angle=angle,
        shift_time=float(shift_time),
        reduced_period=period,
        fit_residual=residual,
        generator_residual=generator_residual,
        section=section,
    )


def carousel_curve(
    polygon: CentroaffinePolygon, shift_time: float, size: int = 1024, tol: float = 1e-10
) -> CentroaffineCurve:
    """Trace P_0 over n shift times and rescale to a π-anti-periodic unit-Wronskian curve."""
    n = polygon.n
    if shift_time <= 0:
        raise DomainError("shift time must be positive")
    anti_period = n * shift_time
    half = size // 2
    times = anti_period * np.arange(half + 1) / half
    sol = solve_ivp(_rhs, (0.0, anti_period), polygon.vertices[:n].ravel(), method="DOP853",
                    args=(n,), t_eval=times, rtol=0.01 * tol, atol=0.01 * tol)
    if not sol.success:
        raise IntegrationError(sol.message)
    trace = sol.y[:2].T
    scale = np.sqrt(np.pi / anti_period)
    gap = float(np.max(np.abs(trace[-1] + trace[0])))
    logger.debug("Carousel trace closed", extra={"gap": gap, "anti_period": anti_period})
    if gap > 1e-4 * (1.0 + np.max(np.abs(trace))):
        raise ConstructionError(f"vertex trace is not anti-periodic (gap {gap:.3e})")
    return CentroaffineCurve.from_half(scale * trace[:-1])


@dataclass(frozen=True)
class CarouselClosure:
    offset: float
    level: float
    polygon: CentroaffinePolygon
    monodromy: Monodromy
    curve: CentroaffineCurve
    certificate: SelfBacklundCertificate
    scan: list[tuple[float, float]]


def _angle_at(offset: float, tol: float) -> float:
    return monodromy(decagon_from_frieze(GOLDEN + offset, GOLDEN), tol=tol).angle


def close_carousel(
    offsets: Sequence[float], tol: float = 1e-10, size: int = 1024, threads: int = 1
) -> CarouselClosure:
    """Shoot over levels of H for a decagon whose monodromy is the identity.

    Levels are parametrized by the starting frieze point (φ + s, φ), with φ the
    golden ratio. The rotation angle of the monodromy is scanned over the
    offsets s and refined by brentq where it crosses zero.
    """
    offsets = [float(s) for s in offsets]
    if len(offsets) < 2 or min(offsets) <= -GOLDEN:
        raise DomainError("need at least two offsets keeping the frieze positive")

    def scan_one(offset: float) -> float:
        return _angle_at(offset, tol)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            angles = list(pool.map(scan_one, offsets))
    else:
        angles = [scan_one(s) for s in offsets]
    scan = list(zip(offsets, angles))
    logger.info("Carousel level scan finished", extra={"points": len(scan)})

    bracket_pair = None
    for (s0, a0), (s1, a1) in zip(scan[:-1], scan[1:]):
        if a0 * a1 <= 0 and max(abs(a0), abs(a1)) < np.pi / 2:
            bracket_pair = (s0, s1)
            break
    if bracket_pair is None:
        raise BracketError("the monodromy angle does not cross zero on the scanned levels")
    offset = float(brentq(_angle_at, *bracket_pair, args=(tol,), xtol=1e-12))
    polygon = decagon_from_frieze(GOLDEN + offset, GOLDEN)
    result = monodromy(polygon, tol=tol)
    curve = carousel_curve(polygon, result.shift_time, size=size, tol=tol)
    certificate = verify_self_backlund(curve, np.pi / polygon.n)
    logger.info(
        "Closed carousel found",
        extra={"offset": offset, "angle": result.angle, "residual": certificate.residual},
    )
    if certificate.residual > CERTIFICATE_TOLERANCE:
        raise ValidationFailure(
            f"carousel curve fails the self-Bäcklund check ({certificate.residual:.3e})"
        )
    return CarouselClosure(
        offset=offset,
        level=frieze5_hamiltonian(GOLDEN + offset, GOLDEN),
        polygon=polygon,
        monodromy=result,
        curve=curve,
        certificate=certificate,
        scan=scan,
    )


@dataclass(frozen=True)
class MinorInequality:
    lhs: float
    rhs: float
    equality: bool


def minor_inequality_check(polygon: CentroaffinePolygon) -> MinorInequality:
    """Σ [P_{i−1}, P_{i+1}] ≥ 2n cos(π/n), with equality for regular polygons."""
    n = polygon.n
    lhs = float(np.sum(polygon.hill_coeffs))
    rhs = 2.0 * n * np.cos(np.pi / n)
    if lhs < rhs - 1e-10:
        raise ValidationFailure(f"Σ a_i = {lhs:.12g} is below 2n cos(π/n) = {rhs:.12g}")
    return MinorInequality(lhs=lhs, rhs=float(rhs), equality=polygon.is_regular(1e-9))


@dataclass(frozen=True)
class RadiusBound:
    constant: float
    bound: float
    max_radius: float
    min_radius: float


def radius_bound(trajectory: CarouselTrajectory) -> RadiusBound:
    """Check 1/R ≤ r_i ≤ R with R = C^{3/2} and C the largest r_i r_{i+1} on the trajectory."""
    radii = np.linalg.norm(np.array([s.polygon.vertices for s in trajectory.states]), axis=2)
    products = radii * np.roll(radii, -1, axis=1)
    constant = float(np.max(products))
    bound = constant**1.5
    result = RadiusBound(constant=constant, bound=bound, max_radius=float(np.max(radii)),
                         min_radius=float(np.min(radii)))
    if result.max_radius > bound * (1 + 1e-12) or result.min_radius < (1 - 1e-12) / bound:
        raise ValidationFailure("vertex radii escape the compactness bound")
    return result
