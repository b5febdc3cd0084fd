"""Trigonometric interpolation on uniform periodic grids.

All helpers act along axis 0, so an ``(N,)`` potential and an ``(N, 2)`` array of
plane points are handled alike.
"""

import numpy as np
from numpy.typing import NDArray
from scipy import fft


def wavenumbers(n: int, period: float) -> NDArray[np.float64]:
    """Angular wavenumbers of an n-point grid over one period."""
    return 2.0 * np.pi * fft.fftfreq(n, d=period / n)


def _broadcast(k: NDArray[np.float64], values: NDArray) -> NDArray:
    return k.reshape((-1,) + (1,) * (values.ndim - 1))


def derivative(values: NDArray, period: float, order: int = 1) -> NDArray:
    """Spectral derivative of periodic samples.

    The Nyquist mode is dropped for odd orders so real input stays real.
    """
    n = values.shape[0]
    k = wavenumbers(n, period)
    factor = (1j * k) ** order
    if order % 2 == 1 and n % 2 == 0:
        factor[n // 2] = 0.0
    result = fft.ifft(_broadcast(factor, values) * fft.fft(values, axis=0), axis=0)
    if np.isrealobj(values):
        return result.real
    return result


def shift(values: NDArray, period: float, delta: float) -> NDArray:
    """Samples of t -> v(t + delta) on the same grid."""
    n = values.shape[0]
    k = wavenumbers(n, period)
    phase = np.exp(1j * k * delta)
    if n % 2 == 0:
        # split Nyquist mode symmetrically
        phase[n // 2] = np.cos(k[n // 2] * delta)
    result = fft.ifft(_broadcast(phase, values) * fft.fft(values, axis=0), axis=0)
    if np.isrealobj(values):
        return result.real
    return result


def evaluate(values: NDArray, period: float, t: NDArray | float) -> NDArray:
    """Evaluate the trigonometric interpolant of ``values`` at arbitrary points."""
    n = values.shape[0]
    coeffs = fft.fft(values, axis=0) / n
    k = wavenumbers(n, period)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    basis = np.exp(1j * np.outer(t, k))
    if n % 2 == 0:
        basis[:, n // 2] = np.cos(k[n // 2] * t)
    result = basis @ coeffs.reshape(n, -1)
    result = result.reshape(t.shape + values.shape[1:])
    if np.isrealobj(values):
        return result.real
    return result


def periodic_antiderivative(values: NDArray, period: float, t: NDArray) -> NDArray:
    """Exact integral from 0 to t of the interpolant, for arbitrary points t."""
    n = values.shape[0]
    coeffs = fft.fft(values, axis=0) / n
    k = wavenumbers(n, period)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    mean = coeffs[0].real
    with np.errstate(divide="ignore", invalid="ignore"):
        weights = np.where(k == 0, 0.0, 1.0 / (1j * np.where(k == 0, 1.0, k)))
    if n % 2 == 0:
        weights[n // 2] = 0.0
    basis = np.exp(1j * np.outer(t, k)) - 1.0
    return (mean * t + basis @ (weights * coeffs)).real


def integral(values: NDArray, period: float) -> NDArray:
    """Integral over one period (trapezoidal rule, spectrally exact)."""
    return np.mean(values, axis=0) * period
