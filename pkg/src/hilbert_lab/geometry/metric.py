"""Hilbert distance, Finsler norm, the function m and the volume density."""

from dataclasses import dataclass
from functools import cached_property
from typing import TYPE_CHECKING, Optional, Tuple

import numpy as np

from hilbert_lab import const
from hilbert_lab.geometry.domain import ConvexDomain, TransformedDomain
from hilbert_lab.geometry.domain.base import unit
from hilbert_lab.geometry.projective import AffineChart
from hilbert_lab.utils.errors import NotInteriorError, UnsupportedDimensionError

if TYPE_CHECKING:
    from hilbert_lab.dynamics.flow import FlowState

# Points are processed in blocks of this size by the batched density.
DENSITY_BLOCK = 2048


@dataclass(frozen=True)
class MetricContext:
    """A domain together with the chart in which euclidean quantities are measured."""

    domain: ConvexDomain
    chart: Optional[AffineChart] = None

    @cached_property
    def space(self) -> ConvexDomain:
        """The domain expressed in the context chart."""
        if self.chart is None or self.chart.is_identity:
            return self.domain
        return TransformedDomain(self.domain, self.chart.homography)

    @property
    def dimension(self) -> int:
        return self.domain.dimension

    def require_interior(self, *points: np.ndarray) -> None:
        for p in points:
            if not self.space.contains(p):
                msg = "Point is not interior"
                raise NotInteriorError(msg, {"x": np.asarray(p).tolist()})


####################################################################################################
# CHORD ALGEBRA
####################################################################################################


def geodesic_step(a: np.ndarray, b: np.ndarray, t: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Chord distances ``(a_t, b_t)`` after flowing a time ``t ≥ 0`` toward x⁺.

    From ``d_Ω(x, x_t) = t`` the displacement is
    ``xx_t = (e^{2t} - 1) / (1/b + e^{2t}/a)``; the remaining distances are
    returned in the cancellation-free form
    ``a_t = a (a+b) e^{-2t} / (a e^{-2t} + b)`` and
    ``b_t = b (a+b) / (a e^{-2t} + b)``.
    """
    decay = np.exp(-2.0 * np.asarray(t, dtype=float))
    denom = a * decay + b
    return a * (a + b) * decay / denom, b * (a + b) / denom


def m_from_chord(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Harmonic mean ``m = 2ab / (a + b)`` of the chord distances."""
    return 2.0 * a * b / (a + b)


####################################################################################################
# METRIC
####################################################################################################


def hilbert_distance(ctx: MetricContext, x: np.ndarray, y: np.ndarray) -> float:
    """Hilbert distance between two interior points.

    With ``D = |xy|``, ``A`` the distance from ``y`` to the exit point beyond
    ``y`` and ``B`` the distance from ``x`` to the exit point behind ``x``,
    ``d = ½ (log(1 + D/A) + log(1 + D/B))``; this is ``½ |log [a, b, x, y]|``
    written with ``log1p`` so that points near the boundary keep their
    precision.

    Parameters
    ----------
    ctx : MetricContext
        The metric context.
    x, y : np.ndarray
        Interior points in the context chart.

    Returns
    -------
    float
        The distance.

    Raises
    ------
    NotInteriorError
        If either point is not interior.

    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.array_equal(x, y):
        return 0.0
    ctx.require_interior(x, y)
    return float(hilbert_distances(ctx, x[None, :], y[None, :])[0])


def hilbert_distances(ctx: MetricContext, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Vectorized Hilbert distance over pairs of interior points (no interior check)."""
    X = np.atleast_2d(X)
    Y = np.atleast_2d(Y)
    diff = Y - X
    D = np.linalg.norm(diff, axis=1)
    out = np.zeros(len(D))
    moving = D > 0
    if np.any(moving):
        u = diff[moving] / D[moving, None]
        A = ctx.space.ray_exit(Y[moving], u)
        B = ctx.space.ray_exit(X[moving], -u)
        out[moving] = 0.5 * (np.log1p(D[moving] / A) + np.log1p(D[moving] / B))
    return out


def finsler_norm(ctx: MetricContext, x: np.ndarray, xi: np.ndarray) -> float:
    """Finsler norm ``F(x, ξ) = |ξ|/2 (1/xx⁺ + 1/xx⁻)``.

    Raises
    ------
    NotInteriorError
        If ``x`` is not interior.

    """
    x = np.asarray(x, dtype=float)
    xi = np.asarray(xi, dtype=float)
    ctx.require_interior(x)
    size = np.linalg.norm(xi)
    if size == 0:
        return 0.0
    a, b = ctx.space.chord_distances(x, xi / size)
    return float(0.5 * size * (1.0 / a + 1.0 / b))


def m_value(ctx: MetricContext, w: "FlowState") -> float:
    """The function ``m(x, [ξ]) = 2 (1/xx⁺ + 1/xx⁻)⁻¹``, so that ``F · m = |ξ|``.

    Raises
    ------
    NotInteriorError
        If the base point is not interior.

    """
    ctx.require_interior(w.x)
    a, b = ctx.space.chord_distances(w.x, unit(w.direction))
    return float(m_from_chord(a, b))


def unit_ball_radius(ctx: MetricContext, x: np.ndarray, directions: np.ndarray) -> np.ndarray:
    """Radial function of the Finsler unit ball at ``x``, i.e. ``m(x, ·)`` on unit directions."""
    a, b = ctx.space.chord_distances(np.asarray(x, dtype=float), directions)
    return m_from_chord(a, b)


####################################################################################################
# VOLUME
####################################################################################################


def circle_rule(samples: int) -> Tuple[np.ndarray, np.ndarray]:
    """Half-circle trapezoid rule; unit-ball radii are even so half the circle suffices."""
    half = samples // 2
    theta = np.pi * np.arange(half) / half
    directions = np.column_stack([np.cos(theta), np.sin(theta)])
    return directions, np.full(half, np.pi / half)


def sphere_rule(nodes: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre in ``cos φ`` times trapezoid in ``θ``; weights sum to 4π."""
    n_lat = int(np.ceil(np.sqrt(nodes / 2)))
    n_lon = 2 * n_lat
    z, w_z = np.polynomial.legendre.leggauss(n_lat)
    theta = 2 * np.pi * np.arange(n_lon) / n_lon
    zz, tt = np.meshgrid(z, theta, indexing="ij")
    rr = np.sqrt(1 - zz**2)
    directions = np.column_stack([(rr * np.cos(tt)).ravel(), (rr * np.sin(tt)).ravel(), zz.ravel()])
    weights = np.outer(w_z, np.full(n_lon, 2 * np.pi / n_lon)).ravel()
    return directions, weights


def _unit_ball_rule(dimension: int, samples: Optional[int]) -> Tuple[np.ndarray, np.ndarray, float]:
    if dimension == 2:
        directions, weights = circle_rule(samples or const.ANGULAR_SAMPLES_2D)
        return directions, weights, np.pi
    if dimension == 3:
        directions, weights = sphere_rule(samples or const.SPHERE_NODES_3D)
        return directions, weights, 4 * np.pi / 3
    msg = f"Volume density is available in dimensions 2 and 3, not {dimension}"
    raise UnsupportedDimensionError(msg)


def volume_density(ctx: MetricContext, x: np.ndarray, samples: Optional[int] = None) -> float:
    """Busemann-Hausdorff density ``ω_n / vol{ξ : F(x, ξ) ≤ 1}``.

    The unit ball is star-shaped with radial function ``m(x, ·)``, so its
    volume is ``(1/n) ∫ m^n`` over the unit sphere, computed by a fixed
    polar quadrature.

    Parameters
    ----------
    ctx : MetricContext
        The metric context.
    x : np.ndarray
        An interior point.
    samples : Optional[int]
        Quadrature size, the module default when omitted.

    Returns
    -------
    float
        The density with respect to Lebesgue measure in the chart.

    Raises
    ------
    NotInteriorError
        If ``x`` is not interior.
    UnsupportedDimensionError
        Outside dimensions 2 and 3.

    """
    x = np.asarray(x, dtype=float)
    _unit_ball_rule(ctx.dimension, samples)
    ctx.require_interior(x)
    return float(volume_densities(ctx, x[None, :], samples)[0])


def _unit_ball_axes(ctx: MetricContext, X: np.ndarray) -> np.ndarray:
    """Boundary normal and tangent axes at each point, scaled by ``m`` along them.

    Near the boundary the unit ball is thin along the normal and long along
    the tangent directions; integrating in the frame of these axes keeps the
    quadrature resolved at any depth.

    Returns
    -------
    np.ndarray
        Array of shape (k, n, n) whose rows are the scaled axes.

    """
    k, n = X.shape
    grads = ctx.space.gradient(X)
    sizes = np.linalg.norm(grads, axis=1)
    flat = sizes < const.ZERO_VECTOR_TOL
    normals = np.where(flat[:, None], np.eye(n)[0], grads / np.where(flat, 1.0, sizes)[:, None])
    if n == 2:
        axes = np.stack([normals, np.column_stack([-normals[:, 1], normals[:, 0]])], axis=1)
    else:
        helper = np.eye(n)[np.argmin(np.abs(normals), axis=1)]
        t1 = np.cross(normals, helper)
        t1 /= np.linalg.norm(t1, axis=1, keepdims=True)
        axes = np.stack([normals, t1, np.cross(normals, t1)], axis=1)
    a, b = ctx.space.chord_distances(np.repeat(X, n, axis=0), axes.reshape(-1, n))
    return axes * m_from_chord(a, b).reshape(k, n, 1)


def volume_densities(ctx: MetricContext, X: np.ndarray, samples: Optional[int] = None) -> np.ndarray:
    """Vectorized volume density over interior points (no interior check).

    The unit ball at each point is integrated after the linear change of
    variables given by its scaled normal and tangent axes.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    directions, weights, omega = _unit_ball_rule(ctx.dimension, samples)
    n = ctx.dimension
    q = len(directions)
    block_size = max(1, DENSITY_BLOCK * 64 // q)
    out = np.empty(len(X))
    for start in range(0, len(X), block_size):
        block = X[start : start + block_size]
        k = len(block)
        axes = _unit_ball_axes(ctx, block)
        mapped = np.einsum("qj,kjn->kqn", directions, axes)
        stretch = np.linalg.norm(mapped, axis=2)
        rays = (mapped / stretch[:, :, None]).reshape(-1, n)
        a, b = ctx.space.chord_distances(np.repeat(block, q, axis=0), rays)
        radius = m_from_chord(a, b).reshape(k, q) / stretch
        jacobian = np.abs(np.linalg.det(axes))
        # Full-sphere integral in 3D, half circle with doubled integrand in 2D.
        volume = jacobian * (radius**n @ weights) / n * (2.0 if n == 2 else 1.0)
        out[start : start + block_size] = omega / volume
    return out


####################################################################################################
# GEODESIC DIVERGENCE
####################################################################################################


def ray_separation(
    ctx: MetricContext,
    origin: np.ndarray,
    u: np.ndarray,
    u2: np.ndarray,
    times: np.ndarray,
) -> np.ndarray:
    """Distances ``d(σ(t), τ(t))`` between two unit-speed geodesic rays from one point.

    Two rays leaving a common point separate monotonically, so the
    returned sequence is nondecreasing in ``t``.
    """
    origin = np.asarray(origin, dtype=float)
    ctx.require_interior(origin)
    times = np.asarray(times, dtype=float)
    ends = []
    for direction in (unit(u), unit(u2)):
        a, b = ctx.space.chord_distances(origin, direction)
        a_t, _ = geodesic_step(np.full(len(times), a), np.full(len(times), b), times)
        ends.append(origin + (a - a_t)[:, None] * direction)
    return hilbert_distances(ctx, ends[0], ends[1])
