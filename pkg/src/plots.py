"""SVG figures.

Figures are built on bare ``Figure`` objects without pyplot state. Output is
deterministic given a fixed ``svg.hashsalt`` and no date metadata.
"""

import io
import logging
from collections.abc import Sequence
from pathlib import Path

import matplotlib
import numpy as np
from matplotlib.axes import Axes
from matplotlib.figure import Figure
from numpy.typing import NDArray

from src.artifacts import atomic_write_text
from src.curves import CentroaffineCurve
from src.polygons import SymmetricPolygon

logger = logging.getLogger(__name__)


def configure(hashsalt: str) -> None:
    matplotlib.rcParams["svg.hashsalt"] = hashsalt
    matplotlib.rcParams["svg.fonttype"] = "none"
    matplotlib.rcParams["path.simplify"] = False


def save_svg(fig: Figure, path: Path) -> Path:
    buffer = io.StringIO()
    fig.savefig(buffer, format="svg", metadata={"Date": None})
    logger.debug("Rendered figure", extra={"path": str(path)})
    return atomic_write_text(path, buffer.getvalue())


def _axes(title: str | None = None) -> tuple[Figure, Axes]:
    fig = Figure(figsize=(6, 6))
    ax = fig.add_subplot()
    ax.set_aspect("equal")
    ax.axhline(0.0, color="0.85", linewidth=0.5)
    ax.axvline(0.0, color="0.85", linewidth=0.5)
    if title:
        ax.set_title(title)
    return fig, ax


def _closed(points: NDArray) -> NDArray:
    return np.vstack([points, points[:1]])


def curve_figure(
    curve: CentroaffineCurve,
    path: Path,
    alpha: float | None = None,
    middle: NDArray | None = None,
    chords: int = 12,
    title: str | None = None,
) -> Path:
    """Curve in blue, optional chords γ(t)γ(t+α) in green and the midpoint curve in red."""
    fig, ax = _axes(title)
    points = _closed(curve.samples) if curve.closed else curve.samples
    ax.plot(points[:, 0], points[:, 1], color="tab:blue", linewidth=1.2)
    if alpha is not None and curve.closed:
        shifted = curve.shifted(alpha)
        for j in np.linspace(0, curve.size, chords, endpoint=False).astype(int):
            ax.plot([curve.samples[j, 0], shifted[j, 0]], [curve.samples[j, 1], shifted[j, 1]],
                    color="tab:green", linewidth=0.6)
    if middle is not None:
        mid = _closed(middle)
        ax.plot(mid[:, 0], mid[:, 1], color="tab:red", linewidth=1.0)
    return save_svg(fig, path)


def overlay_figure(
    curves: Sequence[CentroaffineCurve], labels: Sequence[str], path: Path, title: str | None = None
) -> Path:
    """Several closed curves on one plot; the unit circle is drawn in black."""
    fig, ax = _axes(title)
    circle = np.linspace(0.0, 2.0 * np.pi, 400)
    ax.plot(np.cos(circle), np.sin(circle), color="black", linewidth=0.8)
    for curve, label in zip(curves, labels):
        points = _closed(curve.samples)
        ax.plot(points[:, 0], points[:, 1], linewidth=1.0, label=label)
    if labels:
        ax.legend(loc="upper right", fontsize="small")
    return save_svg(fig, path)


def polygon_figure(
    polygon: SymmetricPolygon, path: Path, k: int | None = None, title: str | None = None
) -> Path:
    """Polygon with its diagonals P_i P_{i+k}."""
    fig, ax = _axes(title)
    vertices = polygon.vertices
    outline = _closed(vertices)
    ax.plot(outline[:, 0], outline[:, 1], color="tab:blue", linewidth=1.2, marker="o",
            markersize=3)
    if k is not None:
        m = vertices.shape[0]
        for i in range(m):
            j = (i + k) % m
            ax.plot([vertices[i, 0], vertices[j, 0]], [vertices[i, 1], vertices[j, 1]],
                    color="tab:green", linewidth=0.5)
    return save_svg(fig, path)


def point_cloud_figure(points: NDArray, path: Path, title: str | None = None) -> Path:
    fig, ax = _axes(title)
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    ax.scatter(points[:, 0], points[:, 1], s=0.2, color="tab:blue", linewidths=0)
    return save_svg(fig, path)


def traces_figure(traces: NDArray, path: Path, title: str | None = None) -> Path:
    """Vertex trajectories of shape (time, vertex, 2), with the central reflections added."""
    fig, ax = _axes(title)
    traces = np.asarray(traces, dtype=float)
    for sign in (1.0, -1.0):
        for i in range(traces.shape[1]):
            ax.plot(sign * traces[:, i, 0], sign * traces[:, i, 1], linewidth=0.8)
    return save_svg(fig, path)


def disk_figure(points: NDArray, path: Path, title: str | None = None) -> Path:
    """Curve in the Poincaré disk."""
    fig, ax = _axes(title)
    circle = np.linspace(0.0, 2.0 * np.pi, 400)
    ax.plot(np.cos(circle), np.sin(circle), color="black", linewidth=0.8)
    ax.plot(points[:, 0], points[:, 1], color="tab:purple", linewidth=1.0)
    return save_svg(fig, path)


def graph_figure(
    x: NDArray, series: Sequence[tuple[NDArray, str]], path: Path, ylim: tuple[float, float] | None,
    title: str | None = None,
) -> Path:
    """Plain function graphs; values beyond ``ylim`` are masked to break asymptotes."""
    fig = Figure(figsize=(8, 5))
    ax = fig.add_subplot()
    for values, color in series:
        values = np.asarray(values, dtype=float)
        if ylim is not None:
            values = np.where((values < ylim[0]) | (values > ylim[1]), np.nan, values)
        ax.plot(x, values, color=color, linewidth=0.8)
    if ylim is not None:
        ax.set_ylim(*ylim)
    if title:
        ax.set_title(title)
    return save_svg(fig, path)
