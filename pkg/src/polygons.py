"""Centroaffine polygons, butterflies and discrete Bäcklund transformations.

Vertices are indexed from 0. A centroaffine 2n-gon has [P_i, P_{i+1}] = 1 and
P_{i+n} = −P_i, and satisfies P_{i+1} = a_i P_i − P_{i−1} with a_i = [P_{i−1}, P_{i+1}].
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray
from scipy.optimize import least_squares

from src.curves import bracket
from src.errors import ConstructionError, DegeneracyError, DomainError

logger = logging.getLogger(__name__)

SIDE_TOLERANCE = 1e-10
CLOSURE_TOLERANCE = 1e-9
DEGENERACY_TOLERANCE = 1e-14
KERNEL_TOLERANCE = 1e-10


def symmetric_vertices(half: NDArray) -> NDArray:
    """All 2n vertices from the first n, with P_{i+n} = −P_i."""
    half = np.asarray(half, dtype=float)
    return np.concatenate([half, -half])


@dataclass(frozen=True)
class SymmetricPolygon:
    """Origin-symmetric 2n-gon with arbitrary nonzero side determinants."""

    vertices: NDArray[np.float64]

    def __post_init__(self) -> None:
        vertices = np.asarray(self.vertices, dtype=float)
        if vertices.ndim != 2 or vertices.shape[1] != 2 or vertices.shape[0] % 2:
            raise DomainError("vertices must have shape (2n, 2)")
        n = vertices.shape[0] // 2
        if n < 2:
            raise DomainError("a symmetric polygon needs at least four vertices")
        if not np.array_equal(vertices[n:], -vertices[:n]):
            raise DomainError("vertices must satisfy P_{i+n} = -P_i")
        object.__setattr__(self, "vertices", vertices)

    @classmethod
    def from_half(cls, half: NDArray) -> "SymmetricPolygon":
        return cls(symmetric_vertices(half))

    @property
    def n(self) -> int:
        return self.vertices.shape[0] // 2

    def vertex(self, i: int) -> NDArray:
        return self.vertices[i % (2 * self.n)]

    def sides(self) -> NDArray[np.float64]:
        return bracket(self.vertices, np.roll(self.vertices, -1, axis=0))[: self.n]

    def diagonals(self, k: int) -> NDArray[np.float64]:
        """[P_i, P_{i+k}] for i = 0..n−1."""
        return bracket(self.vertices, np.roll(self.vertices, -k, axis=0))[: self.n]


@dataclass(frozen=True)
class CentroaffinePolygon(SymmetricPolygon):
    """Symmetric 2n-gon with unit side determinants and its Hill coefficients."""

    hill_coeffs: NDArray[np.float64] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        super().__post_init__()
        if self.n < 3:
            raise DomainError("a centroaffine polygon needs n ≥ 3")
        sides = self.sides()
        drift = float(np.max(np.abs(sides - 1.0)))
        if drift > SIDE_TOLERANCE * max(1.0, float(np.max(np.abs(self.vertices))) ** 2):
            raise ConstructionError(f"side determinants deviate from 1 by {drift:.3e}")
        previous = np.roll(self.vertices, 1, axis=0)
        following = np.roll(self.vertices, -1, axis=0)
        coeffs = bracket(previous, following)
        recurrence = coeffs[:, None] * self.vertices - previous - following
        if np.max(np.abs(recurrence)) > SIDE_TOLERANCE * (1.0 + np.max(np.abs(self.vertices))) * (
            1.0 + np.max(np.abs(coeffs))
        ):
            raise ConstructionError("vertices do not satisfy P_{i+1} = a_i P_i - P_{i-1}")
        object.__setattr__(self, "hill_coeffs", coeffs[: self.n])

    def normalized(self) -> "CentroaffinePolygon":
        """SL₂-image with P_0 = (1, 0) and P_1 = (0, 1)."""
        frame = np.column_stack([self.vertices[0], self.vertices[1]])
        return CentroaffinePolygon(self.vertices @ np.linalg.inv(frame).T)

    def is_regular(self, tolerance: float = 1e-6) -> bool:
        return bool(np.max(self.hill_coeffs) - np.min(self.hill_coeffs) < tolerance)


def hill_monodromy(a: NDArray) -> tuple[NDArray, NDArray]:
    """Propagate P_{i+1} = a_i P_i − P_{i−1} from P_0 = (1,0), P_1 = (0,1).

    Returns the points P_0..P_{n+1} and the monodromy matrix (columns P_n, P_{n+1}).
    """
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    points = np.zeros((n + 2, 2))
    points[0] = (1.0, 0.0)
    points[1] = (0.0, 1.0)
    for i in range(1, n + 1):
        points[i + 1] = a[i % n] * points[i] - points[i - 1]
    return points, np.column_stack([points[n], points[n + 1]])


def from_hill(a: NDArray) -> CentroaffinePolygon | None:
    """The polygon with Hill coefficients a, or None when the monodromy is not −Id."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 1 or a.shape[0] < 3:
        raise DomainError("need at least three Hill coefficients")
    points, monodromy = hill_monodromy(a)
    defect = float(np.max(np.abs(monodromy + np.eye(2))))
    if defect > CLOSURE_TOLERANCE:
        logger.debug(
            "Hill coefficients do not close",
            extra={"defect": defect, "monodromy": monodromy.tolist()},
        )
        return None
    return CentroaffinePolygon(symmetric_vertices(points[: a.shape[0]]))


def regular_polygon(n: int) -> CentroaffinePolygon:
    """Euclidean-regular 2n-gon scaled to unit side determinants."""
    if n < 3:
        raise DomainError("n must be at least 3")
    angles = np.pi * np.arange(n) / n
    radius = 1.0 / np.sqrt(np.sin(np.pi / n))
    return CentroaffinePolygon(symmetric_vertices(radius * np.column_stack([np.cos(angles),
                                                                     np.sin(angles)])))


@dataclass(frozen=True)
class Frieze:
    """Determinants rows[d][i] = [P_i, P_{i+d}] for d = 0..n, i = 0..n−1."""

    rows: NDArray[np.float64]
    positive: bool

    @property
    def first_row(self) -> NDArray[np.float64]:
        """[P_{i−1}, P_{i+1}], which are the Hill coefficients a_i."""
        return np.roll(self.rows[2], 1)


def frieze(polygon: SymmetricPolygon) -> Frieze:
    n = polygon.n
    rows = np.array([polygon.diagonals(d) for d in range(n + 1)])
    positive = bool(np.all(rows[1:n] > 0))
    return Frieze(rows=rows, positive=positive)


def involution(a: NDArray, b: NDArray, x: NDArray) -> NDArray:
    """The linear involution interchanging A and B, applied to X.

    Raises:
        DegeneracyError: If [A, B] vanishes.
    """
    a, b, x = (np.asarray(v, dtype=float) for v in (a, b, x))
    det = float(bracket(a, b))
    if abs(det) < DEGENERACY_TOLERANCE:
        raise DegeneracyError("[A, B] vanishes; the involution is undefined")
    return (float(bracket(a, x)) * a + float(bracket(x, b)) * b) / det


def butterfly_residual(p1: NDArray, p2: NDArray, p3: NDArray, p4: NDArray) -> float:
    """Deviation from [P1,P2] = [P4,P3] and [P2,P3] = [P1,P4]."""
    return max(
        abs(float(bracket(p1, p2) - bracket(p4, p3))),
        abs(float(bracket(p2, p3) - bracket(p1, p4))),
    )


def butterfly_fourth(p1: NDArray, p2: NDArray, p3: NDArray) -> NDArray:
    """Complete P1P2P3 to a centroaffine butterfly: P4 = I_{P1P3}(P2).

    Raises:
        DegeneracyError: If [P1, P3] vanishes.
        ConstructionError: If the butterfly relations or the diagonal geometry fail.
    """
    p1, p2, p3 = (np.asarray(v, dtype=float) for v in (p1, p2, p3))
    p4 = involution(p1, p3, p2)
    scale = (1.0 + max(np.max(np.abs(v)) for v in (p1, p2, p3, p4))) ** 2
    scale /= min(1.0, abs(float(bracket(p1, p3))))
    residuals = (
        butterfly_residual(p1, p2, p3, p4),
        abs(float(bracket(p3 - p1, p4 - p2))),
        abs(float(bracket(p1 + p3, p2 + p4))),
    )
    if max(residuals) > 1e-12 * scale:
        raise ConstructionError(f"butterfly checks failed: {residuals}")
    return p4


@dataclass(frozen=True)
class BacklundTransform:
    points: NDArray[np.float64]
    closed: bool
    rail: float
    gap: float


def backlund_transform(
    polygon: SymmetricPolygon | NDArray, q1: NDArray
) -> BacklundTransform:
    """Build Q_2, …, Q_{m+1} by Q_{i+1} = I_{Q_i P_{i+1}}(P_i).

    ``polygon`` may also be any closed vertex array P_1..P_m.

    Raises:
        DegeneracyError: If an involution is degenerate; the message names the step.
        ConstructionError: If determinants drift along the construction.
    """
    vertices = polygon.vertices if isinstance(polygon, SymmetricPolygon) else np.asarray(
        polygon, dtype=float
    )
    m = vertices.shape[0]
    q = np.zeros((m + 1, 2))
    q[0] = np.asarray(q1, dtype=float)
    rail = float(bracket(vertices[0], q[0]))
    if abs(rail) < DEGENERACY_TOLERANCE:
        raise DegeneracyError("[P_1, Q_1] vanishes")
    for i in range(m):
        following = vertices[(i + 1) % m]
        try:
            q[i + 1] = involution(q[i], following, vertices[i])
        except DegeneracyError as e:
            logger.error("Degenerate Bäcklund step", extra={"step": i + 1, "error": str(e)})
            raise DegeneracyError(f"degenerate involution at step {i + 1}") from e

    scale = 1.0 + float(np.max(np.abs(q))) ** 2 + float(np.max(np.abs(vertices))) ** 2
    sides_p = bracket(vertices, np.roll(vertices, -1, axis=0))
    sides_q = bracket(q[:-1], q[1:])
    rails = bracket(np.vstack([vertices, vertices[:1]]), q)
    drift = max(float(np.max(np.abs(sides_q - sides_p))), float(np.max(np.abs(rails - rail))))
    if drift > 1e-9 * scale:
        raise ConstructionError(f"Bäcklund construction drifted by {drift:.3e}")
    gap = float(np.linalg.norm(q[-1] - q[0]))
    return BacklundTransform(points=q, closed=gap < CLOSURE_TOLERANCE, rail=rail, gap=gap)


def recut(polygon: SymmetricPolygon, i: int) -> SymmetricPolygon:
    """Replace P_i by I_{P_{i−1}P_{i+1}}(P_i), keeping the central symmetry.

    Centroaffine polygons come back as centroaffine polygons; they are fixed
    by every T_i because adjacent side determinants are equal.
    """
    n = polygon.n
    i %= n
    half = polygon.vertices[:n].copy()
    half[i] = involution(polygon.vertex(i - 1), polygon.vertex(i + 1), polygon.vertex(i))
    if isinstance(polygon, CentroaffinePolygon):
        return CentroaffinePolygon(symmetric_vertices(half))
    return SymmetricPolygon(symmetric_vertices(half))


def recut_full(polygon: SymmetricPolygon) -> SymmetricPolygon:
    """T_n ∘ … ∘ T_1."""
    for i in range(polygon.n):
        polygon = recut(polygon, i)
    return polygon


@dataclass(frozen=True)
class RecutOrbit:
    final: SymmetricPolygon
    max_radius: NDArray[np.float64]
    min_radius: NDArray[np.float64]
    history: NDArray[np.float64] | None = None

    @property
    def bounded(self) -> bool:
        return bool(np.all(np.isfinite(self.max_radius)))


def recut_orbit(
    polygon: SymmetricPolygon, iterations: int, record: bool = False
) -> RecutOrbit:
    """Iterate the full recut; with ``record`` the vertices of every iterate are kept."""
    history = np.zeros((iterations + 1, 2 * polygon.n, 2)) if record else None
    if history is not None:
        history[0] = polygon.vertices
    max_radius = np.zeros(iterations + 1)
    min_radius = np.zeros(iterations + 1)
    radii = np.linalg.norm(polygon.vertices, axis=1)
    max_radius[0], min_radius[0] = radii.max(), radii.min()
    for step in range(1, iterations + 1):
        polygon = recut_full(polygon)
        radii = np.linalg.norm(polygon.vertices, axis=1)
        max_radius[step], min_radius[step] = radii.max(), radii.min()
        if history is not None:
            history[step] = polygon.vertices
    logger.info(
        "Recutting orbit",
        extra={"iterations": iterations, "max_radius": float(max_radius.max()),
               "min_radius": float(min_radius.min())},
    )
    return RecutOrbit(final=polygon, max_radius=max_radius, min_radius=min_radius,
                      history=history)


def is_self_backlund(polygon: SymmetricPolygon, k: int, tolerance: float = 1e-9) -> float | None:
    """The common value of [P_i, P_{i+k}], or None when they differ."""
    if not 2 <= k <= polygon.n - 2:
        raise DomainError(f"k must lie in [2, n-2], got {k}")
    values = polygon.diagonals(k)
    if np.max(values) - np.min(values) > tolerance:
        return None
    return float(np.mean(values))


def _unit_sides(vertices: NDArray) -> NDArray:
    side = float(bracket(vertices[0], vertices[1]))
    if side <= 0:
        raise ConstructionError("construction is not positively oriented")
    return vertices / np.sqrt(side)


def collinear_constant(k0: int) -> tuple[float, float]:
    """(a, c) of the collinear-points construction with k = k0 + 2."""
    root = np.sqrt(k0**2 + 8.0)
    return float((root - k0) / 4.0), float((root + k0) / 2.0)


def construct_nk(n: int, k: int, dilation: float = 1.2) -> CentroaffinePolygon | None:
    """A non-regular self-Bäcklund (n, k)-gon for the flexible cases.

    * n even, k odd: the regular n-gon interleaved with its dilated side midpoints.
    * n = 2k: points on the lines y = ±1 together with (±1, 0) and (0, ±1/a).

    Returns None when (n, k) is in neither case.
    """
    if n % 2 == 0 and k % 2 == 1 and 3 <= k <= n - 3:
        if np.isclose(dilation * np.cos(np.pi / n), 1.0):
            raise DomainError("this dilation reproduces the regular polygon")
        angles = 2.0 * np.pi * np.arange(n // 2) / n
        corners = np.column_stack([np.cos(angles), np.sin(angles)])
        step = angles + 2.0 * np.pi / n
        following = np.column_stack([np.cos(step), np.sin(step)])
        midpoints = 0.5 * dilation * (corners + following)
        half = np.empty((n, 2))
        half[0::2] = corners
        half[1::2] = midpoints
        polygon = CentroaffinePolygon(symmetric_vertices(_unit_sides(half)))
    elif n == 2 * k and k >= 2:
        k0 = k - 2
        a, _ = collinear_constant(k0)
        top_right = [(a + j, 1.0) for j in range(k0, -1, -1)]
        top_left = [(-a - j, 1.0) for j in range(k0 + 1)]
        half = np.array([(1.0, 0.0), *top_right, (0.0, 1.0 / a), *top_left])
        polygon = CentroaffinePolygon(symmetric_vertices(half))
    else:
        logger.info("No flexible construction for this (n, k)", extra={"n": n, "k": k})
        return None

    polygon = polygon.normalized()
    c = is_self_backlund(polygon, k)
    if c is None:
        raise ConstructionError(f"({n},{k}) construction is not self-Bäcklund")
    if np.var(polygon.hill_coeffs) <= 1e-8:
        raise ConstructionError(f"({n},{k}) construction collapsed to the regular polygon")
    logger.info("Constructed self-Bäcklund polygon", extra={"n": n, "k": k, "c": c})
    return polygon


@dataclass(frozen=True)
class RigidityReport:
    n: int
    k: int
    eigenvalues: NDArray[np.complex128]
    kernel_indices: list[int]
    criterion_indices: list[int]
    arithmetic_indices: list[int]

    @property
    def kernel_dim(self) -> int:
        return len(self.kernel_indices)

    @property
    def nontrivial(self) -> bool:
        return self.kernel_dim > 3


def circulant_eigenvalues(n: int, k: int) -> NDArray[np.complex128]:
    theta = np.pi / n
    mu_minus, mu_plus = np.sin((k - 1) * theta), np.sin((k + 1) * theta)
    w = np.exp(2j * np.pi * np.arange(n) / n)
    return mu_minus - mu_plus * w + mu_plus * w**k - mu_minus * w ** (k + 1)


def tangent_criterion(n: int, k: int, j: int) -> bool:
    """tan(πj/n)tan(πk/n) = tan(πjk/n)tan(π/n), including the cases with infinite sides."""
    for jj in {j, n - j}:
        if n == 2 * jj and k % 2 == 1:
            return True
        if n == 2 * k and jj % 2 == 1:
            return True
    theta = np.pi / n
    cosines = np.cos(np.array([j * theta, k * theta, j * k * theta]))
    if np.any(np.abs(cosines) < 1e-12):
        return False
    lhs = np.tan(j * theta) * np.tan(k * theta)
    rhs = np.tan(j * k * theta) * np.tan(theta)
    return bool(abs(lhs - rhs) < 1e-9 * (1.0 + abs(lhs)))


def arithmetic_criterion(n: int, k: int, j: int) -> bool:
    return any(n == 2 * (k + jj) and ((k - 1) * (jj - 1)) % n == 0 for jj in (j, n - j))


def rigidity_analysis(n: int, k: int) -> RigidityReport:
    """Infinitesimal deformations of the regular self-Bäcklund (n, k)-gon."""
    if not 2 <= k <= n / 2:
        raise DomainError(f"need 2 ≤ k ≤ n/2, got n={n}, k={k}")
    eigenvalues = circulant_eigenvalues(n, k)
    kernel = [0, 1, n - 1]
    criterion = []
    arithmetic = []
    for j in range(2, n - 1):
        magnitude = abs(eigenvalues[j])
        by_tangents = tangent_criterion(n, k, j)
        by_arithmetic = arithmetic_criterion(n, k, j)
        if by_tangents:
            criterion.append(j)
        if by_arithmetic:
            arithmetic.append(j)
        zero = magnitude < KERNEL_TOLERANCE or (magnitude < 1e-6 and by_arithmetic)
        if zero:
            kernel.append(j)
        if zero != by_tangents:
            logger.warning(
                "Eigenvalue and tangent criterion disagree",
                extra={"n": n, "k": k, "j": j, "eigenvalue": magnitude},
            )
    kernel = sorted(set(kernel))
    logger.info("Rigidity analysis", extra={"n": n, "k": k, "kernel": kernel})
    return RigidityReport(
        n=n,
        k=k,
        eigenvalues=eigenvalues,
        kernel_indices=kernel,
        criterion_indices=criterion,
        arithmetic_indices=arithmetic,
    )


@dataclass(frozen=True)
class SearchReport:
    n: int
    k: int
    restarts: int
    converged: int
    regular: int
    solutions: list[NDArray[np.float64]]

    @property
    def only_regular(self) -> bool:
        return self.converged > 0 and self.regular == self.converged


def _search_residual(params: NDArray, n: int, k: int) -> NDArray:
    a, c = params[:n], params[n]
    points = np.zeros((n + k + 1, 2))
    points[0] = (1.0, 0.0)
    points[1] = (0.0, 1.0)
    for i in range(1, n + k):
        points[i + 1] = a[i % n] * points[i] - points[i - 1]
    closure = np.concatenate([points[n] + points[0], points[n + 1] + points[1]])
    diagonals = bracket(points[:n], points[k : n + k]) - c
    return np.concatenate([closure, diagonals])


def search_self_backlund(
    n: int, k: int, restarts: int = 100, seed: int = 0, spread: float = 0.3, threads: int = 1
) -> SearchReport:
    """Random-restart Levenberg–Marquardt search for self-Bäcklund (n, k)-gons.

    Each start perturbs the regular Hill coefficients; converged solutions are
    classified as regular when their coefficients are constant.
    """
    if not 2 <= k <= n - 2:
        raise DomainError(f"k must lie in [2, n-2], got {k}")
    rng = np.random.default_rng(seed)
    regular_a = 2.0 * np.cos(np.pi / n)
    regular_c = np.sin(np.pi * k / n) / np.sin(np.pi / n)
    starts = [
        np.concatenate([regular_a + spread * rng.standard_normal(n),
                        [regular_c + spread * rng.standard_normal()]])
        for _ in range(restarts)
    ]

    def solve(start: NDArray) -> NDArray | None:
        fit = least_squares(_search_residual, start, args=(n, k), method="lm", xtol=1e-15,
                            ftol=1e-15, gtol=1e-15, max_nfev=4000)
        if np.max(np.abs(fit.fun)) > 1e-10:
            return None
        return fit.x

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(solve, starts))
    else:
        results = [solve(start) for start in starts]

    solutions = [x for x in results if x is not None]
    regular = 0
    nonregular = []
    for x in solutions:
        polygon = from_hill(x[:n])
        if polygon is not None and polygon.is_regular():
            regular += 1
        else:
            nonregular.append(x[:n])
    logger.info(
        "Self-Bäcklund search finished",
        extra={"n": n, "k": k, "restarts": restarts, "converged": len(solutions),
               "regular": regular},
    )
    return SearchReport(
        n=n,
        k=k,
        restarts=restarts,
        converged=len(solutions),
        regular=regular,
        solutions=nonregular,
    )


def ptolemy_residual(polygon: SymmetricPolygon) -> float:
    """Max violation of [P_i,P_{i+1}][P_{i+2},P_{i+3}] + [P_{i+1},P_{i+2}][P_i,P_{i+3}]
    = [P_i,P_{i+2}][P_{i+1},P_{i+3}]."""
    v = polygon.vertices

    def det(shift_a: int, shift_b: int) -> NDArray:
        return bracket(np.roll(v, -shift_a, axis=0), np.roll(v, -shift_b, axis=0))

    lhs = det(0, 1) * det(2, 3) + det(1, 2) * det(0, 3)
    rhs = det(0, 2) * det(1, 3)
    return float(np.max(np.abs(lhs - rhs)))
