"""Dual curves in the hyperbolic plane.

Quadratic forms ax² + 2bxy + cy² carry the metric b² − ac. Unit central
ellipses (ac − b² = 1, a + c > 0) form the pseudo-sphere model of H², and the
osculating ellipses of a centroaffine curve trace its dual curve γ*. The dual
moves with speed |1 + p| and has geodesic curvature κ with (1 + p)(1 + κ) = 2.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from src.curves import CentroaffineCurve, bracket
from src.errors import DegeneracyError, DomainError, InconsistentCurveError
from src.hill import curvature_samples

logger = logging.getLogger(__name__)

MEMBERSHIP_TOLERANCE = 1e-9
SPEED_TOLERANCE = 1e-7
OPEN_TOLERANCE = 1e-4
CUSP_MASK = 1e-4


def minkowski(u: NDArray, v: NDArray) -> NDArray:
    """Polarization of b² − ac for triples (a, b, c) along the last axis."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return u[..., 1] * v[..., 1] - 0.5 * (u[..., 0] * v[..., 2] + u[..., 2] * v[..., 0])


def _ellipse(point: NDArray, velocity: NDArray) -> NDArray:
    x, y = point[..., 0], point[..., 1]
    xp, yp = velocity[..., 0], velocity[..., 1]
    return np.stack([y**2 + yp**2, -(x * y + xp * yp), x**2 + xp**2], axis=-1)


def _hyperbola(point: NDArray, velocity: NDArray) -> NDArray:
    x, y = point[..., 0], point[..., 1]
    xp, yp = velocity[..., 0], velocity[..., 1]
    return np.stack([yp**2 - y**2, x * y - xp * yp, xp**2 - x**2], axis=-1)


def contact_conics(point: NDArray, direction: NDArray) -> tuple[NDArray, NDArray]:
    """Unit central ellipse and hyperbola tangent to a contact element.

    The direction is rescaled so that [point, direction] = 1.

    Raises:
        DegeneracyError: If the tangent line passes through the origin.
    """
    point = np.asarray(point, dtype=float)
    direction = np.asarray(direction, dtype=float)
    det = float(bracket(point, direction))
    if abs(det) < 1e-14:
        raise DegeneracyError("the tangent line of the contact element passes through the origin")
    velocity = direction / det
    return _ellipse(point, velocity), _hyperbola(point, velocity)


def to_disk(triples: NDArray) -> NDArray[np.float64]:
    """Poincaré disk coordinates of pseudo-sphere points via u = (a+c)/2, v = (a−c)/2, w = b."""
    triples = np.asarray(triples, dtype=float)
    u = 0.5 * (triples[..., 0] + triples[..., 2])
    v = 0.5 * (triples[..., 0] - triples[..., 2])
    w = triples[..., 1]
    return np.stack([v / (1.0 + u), w / (1.0 + u)], axis=-1)


@dataclass(frozen=True)
class DualCurve:
    """Samples (a, b, c) of γ* with the source potential, speed and curvature.

    ``kappa`` is NaN where |1 + p| < 1e-4.
    """

    samples: NDArray[np.float64]
    source: CentroaffineCurve = field(repr=False)
    potential: NDArray[np.float64] = field(repr=False)
    speed: NDArray[np.float64] = field(repr=False)
    kappa: NDArray[np.float64] = field(repr=False)

    def __post_init__(self) -> None:
        a, b, c = self.samples.T
        scale = 1.0 + float(np.max(np.abs(self.samples))) ** 2
        tolerance = MEMBERSHIP_TOLERANCE if self.source.closed else OPEN_TOLERANCE
        membership = float(np.max(np.abs(a * c - b**2 - 1.0)))
        if membership > tolerance * scale or np.any(a + c <= 0):
            raise InconsistentCurveError(
                f"dual samples leave the pseudo-sphere (residual {membership:.3e})"
            )

    @property
    def t(self) -> NDArray[np.float64]:
        return self.source.t

    @property
    def cusp_mask(self) -> NDArray[np.bool_]:
        return np.abs(1.0 + self.potential) < CUSP_MASK

    def curvature_relation_residual(self) -> float:
        """Max |(1 + p)(1 + κ) − 2| over the unmasked samples."""
        keep = ~self.cusp_mask
        if not np.any(keep):
            return 0.0
        return float(np.max(np.abs((1.0 + self.potential[keep]) * (1.0 + self.kappa[keep]) - 2.0)))

    def disk(self) -> NDArray[np.float64]:
        return to_disk(self.samples)


def _tangent(point: NDArray, velocity: NDArray) -> NDArray:
    x, y = point[..., 0], point[..., 1]
    xp, yp = velocity[..., 0], velocity[..., 1]
    return np.stack([2.0 * y * yp, -(x * yp + xp * y), 2.0 * x * xp], axis=-1)


def _tangent_prime(point: NDArray, velocity: NDArray, p: NDArray) -> NDArray:
    x, y = point[..., 0], point[..., 1]
    xp, yp = velocity[..., 0], velocity[..., 1]
    return np.stack(
        [2.0 * (yp**2 + p * y**2), -2.0 * (xp * yp + p * x * y), 2.0 * (xp**2 + p * x**2)],
        axis=-1,
    )


def dual_curve(gamma: CentroaffineCurve) -> DualCurve:
    """Osculating-ellipse dual of a unit-Wronskian curve.

    Derivatives come from γ″ = pγ: the dual velocity is (1 + p)·T with T the
    unit tangent, and the normal part of the acceleration is (1 + p)·⟨T′, N⟩,
    so κ = ⟨T′, N⟩/(1 + p).

    Raises:
        InconsistentCurveError: If the samples leave the pseudo-sphere or the
            speed differs from |1 + p|.
    """
    velocity = gamma.derivative(1)
    samples = _ellipse(gamma.samples, velocity)
    normal = _hyperbola(gamma.samples, velocity)
    p = curvature_samples(gamma)
    tangent = _tangent(gamma.samples, velocity)
    first = (1.0 + p)[:, None] * tangent
    squared = minkowski(first, first)
    speed = np.sqrt(np.maximum(squared, 0.0))
    expected = (1.0 + p) ** 2
    tolerance = SPEED_TOLERANCE if gamma.closed else OPEN_TOLERANCE
    speed_residual = float(np.max(np.abs(squared - expected)))
    if speed_residual > tolerance * (1.0 + float(np.max(expected))):
        logger.error("Dual speed check failed", extra={"residual": speed_residual,
                                                       "tolerance": tolerance})
        raise InconsistentCurveError(
            f"squared dual speed differs from (1+p)² by {speed_residual:.3e}"
        )

    kappa = np.full(p.shape, np.nan)
    keep = np.abs(1.0 + p) >= CUSP_MASK
    bend = minkowski(_tangent_prime(gamma.samples, velocity, p), normal)
    kappa[keep] = bend[keep] / (1.0 + p[keep])
    logger.debug(
        "Computed dual curve",
        extra={"size": gamma.size, "speed_residual": speed_residual,
               "masked": int(np.count_nonzero(~keep))},
    )
    return DualCurve(samples=samples, source=gamma, potential=p, speed=speed, kappa=kappa)


def cusp_count(dual: DualCurve) -> int:
    """Number of sign changes of 1 + p, cyclically over a period for closed sources.

    Raises:
        DomainError: If the source is a conic (constant p).
    """
    p = dual.potential
    if float(np.max(p) - np.min(p)) < 1e-8:
        raise DomainError("conics have no cusps to count")
    shifted = 1.0 + p
    if dual.source.closed:
        shifted = shifted[: dual.source.size // 2]
        signs = np.sign(shifted)
        return int(np.count_nonzero(signs != np.roll(signs, -1)))
    signs = np.sign(shifted)
    return int(np.count_nonzero(signs[:-1] != signs[1:]))
