"""SVG figures written as text: 2D domain scenes and scatter plots with a fitted line."""

from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

from hilbert_lab import const
from hilbert_lab.geometry.domain import ConvexDomain
from hilbert_lab.utils.errors import UnsupportedDimensionError

MARGIN = 60
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


class _Frame:
    """Affine map from data coordinates onto the square viewBox, y pointing up."""

    def __init__(self, lo: np.ndarray, hi: np.ndarray, keep_aspect: bool) -> None:
        span = np.maximum(hi - lo, 1e-12)
        inner = const.SVG_VIEWBOX - 2 * MARGIN
        scale = inner / span
        if keep_aspect:
            scale = np.full(2, scale.min())
        self.lo = lo
        self.scale = scale
        self.offset = MARGIN + (inner - span * scale) / 2

    def __call__(self, points: np.ndarray) -> np.ndarray:
        xy = self.offset + (np.atleast_2d(points) - self.lo) * self.scale
        xy[:, 1] = const.SVG_VIEWBOX - xy[:, 1]
        return xy


def _document(body: Iterable[str]) -> str:
    size = const.SVG_VIEWBOX
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {size} {size}" width="{size}" height="{size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
        *body,
        "</svg>",
    ]
    return "\n".join(lines) + "\n"


def _polyline(xy: np.ndarray, color: str, closed: bool = False, width: float = 2.0) -> str:
    points = " ".join(f"{x:.2f},{y:.2f}" for x, y in xy)
    tag = "polygon" if closed else "polyline"
    return f'<{tag} points="{points}" fill="none" stroke="{color}" stroke-width="{width}"/>'


def _dots(xy: np.ndarray, color: str, radius: float = 3.0) -> Iterable[str]:
    return (f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{radius}" fill="{color}"/>' for x, y in xy)


def _text(x: float, y: float, label: str, anchor: str = "middle") -> str:
    return f'<text x="{x:.1f}" y="{y:.1f}" font-family="sans-serif" font-size="24" text-anchor="{anchor}">{label}</text>'


def domain_figure(
    domain: ConvexDomain,
    chords: Sequence[Tuple[np.ndarray, np.ndarray]] = (),
    point_sets: Sequence[np.ndarray] = (),
    samples: int = 720,
) -> str:
    """Boundary of a planar domain with optional chords and point clouds.

    Raises
    ------
    UnsupportedDimensionError
        If the domain is not planar.

    """
    if domain.dimension != 2:
        msg = f"Domain figures are planar, got dimension {domain.dimension}"
        raise UnsupportedDimensionError(msg)

    theta = 2 * np.pi * np.arange(samples) / samples
    directions = np.column_stack([np.cos(theta), np.sin(theta)])
    rim = domain.center + domain.ray_exit(domain.center, directions)[:, None] * directions
    frame = _Frame(rim.min(axis=0), rim.max(axis=0), keep_aspect=True)

    body = [_polyline(frame(rim), "black", closed=True)]
    for i, (start, end) in enumerate(chords):
        body.append(_polyline(frame(np.vstack([start, end])), COLORS[i % len(COLORS)], width=1.5))
    for i, points in enumerate(point_sets):
        body.extend(_dots(frame(np.asarray(points)), COLORS[(i + 1) % len(COLORS)]))
    return _document(body)


def line_plot(
    x: np.ndarray,
    y: np.ndarray,
    fit: Optional[Tuple[float, float]] = None,
    xlabel: str = "",
    ylabel: str = "",
) -> str:
    """Scatter plot of ``(x, y)`` with an optional fitted line ``slope * x + intercept``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    finite = np.isfinite(x) & np.isfinite(y)
    data = np.column_stack([x[finite], y[finite]])
    frame = _Frame(data.min(axis=0), data.max(axis=0), keep_aspect=False)

    size = const.SVG_VIEWBOX
    corner = frame(data.min(axis=0)[None, :])[0]
    body = [
        _polyline(np.array([[MARGIN, corner[1]], [size - MARGIN, corner[1]]]), "gray", width=1),
        _polyline(np.array([[corner[0], MARGIN], [corner[0], size - MARGIN]]), "gray", width=1),
        _text(size / 2, size - 15, xlabel),
        _text(20, size / 2, ylabel, anchor="start"),
    ]
    body.extend(_dots(frame(data), COLORS[0]))
    if fit is not None:
        slope, intercept = fit
        ends = np.array([data[:, 0].min(), data[:, 0].max()])
        body.append(_polyline(frame(np.column_stack([ends, slope * ends + intercept])), COLORS[1]))
        body.append(_text(size - MARGIN, MARGIN, f"slope {slope:.4f}", anchor="end"))
    return _document(body)
