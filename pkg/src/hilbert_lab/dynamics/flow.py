"""Geodesic flow on the homogeneous bundle, the flip, curvature and the tangent flow.

The flow moves a point along its chord at unit Hilbert speed and is
evaluated in closed form from the two chord distances; it is never
integrated numerically.
"""

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from hilbert_lab.geometry.domain.base import unit
from hilbert_lab.geometry.metric import MetricContext, geodesic_step, m_from_chord
from hilbert_lab.utils.errors import InvalidSpecError, NotInteriorError
from hilbert_lab.utils.logging import get_logger

logger = get_logger("dynamics.flow")


@dataclass(frozen=True)
class FlowState:
    """A point of the homogeneous bundle: interior point and unit direction."""

    x: np.ndarray
    direction: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        object.__setattr__(self, "direction", unit(self.direction))


@dataclass(frozen=True)
class TangentVector:
    """Tangent vector to the bundle in a parallel frame of ``E^s ⊕ E^u ⊕ R·X``.

    ``stable_part`` and ``unstable_part`` hold the coordinates along the
    transverse frame (length n - 1), ``flow_part`` the coordinate along the
    generator of the flow.
    """

    base: FlowState
    stable_part: np.ndarray
    unstable_part: np.ndarray
    flow_part: float = 0.0
    frame: Optional[np.ndarray] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "stable_part", np.asarray(self.stable_part, dtype=float))
        object.__setattr__(self, "unstable_part", np.asarray(self.unstable_part, dtype=float))
        if self.frame is None:
            object.__setattr__(self, "frame", transverse_frame(self.base.direction))

    def norm(self) -> float:
        parts = np.concatenate([self.stable_part, self.unstable_part, [self.flow_part]])
        return float(np.linalg.norm(parts))


def transverse_frame(direction: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the complement of ``direction``, one vector per row."""
    direction = unit(direction)
    # Complete with the standard basis; QR keeps the result deterministic.
    q, _ = np.linalg.qr(np.column_stack([direction, np.eye(len(direction))]))
    return q[:, 1:].T


def require_flow_domain(ctx: MetricContext) -> None:
    """Reject domains on which the flow is not defined (polytopes)."""
    if not ctx.domain.supports_flow:
        msg = f"Geodesic flow is not defined on a {ctx.domain.kind} domain"
        raise InvalidSpecError(msg)


def chord_of(ctx: MetricContext, w: FlowState) -> Tuple[float, float]:
    """Euclidean distances ``(xx⁺, xx⁻)`` along the direction of ``w``.

    Raises
    ------
    NotInteriorError
        If the base point is not interior.

    """
    require_flow_domain(ctx)
    if not ctx.space.contains(w.x):
        msg = "Flow state base point is not interior"
        raise NotInteriorError(msg, {"x": w.x.tolist()})
    a, b = ctx.space.chord_distances(w.x, w.direction)
    return float(a), float(b)


def flow_point(ctx: MetricContext, w: FlowState, t: float) -> FlowState:
    """Flow ``w`` for a time ``t`` along its chord.

    Parameters
    ----------
    ctx : MetricContext
        The metric context.
    w : FlowState
        The initial state.
    t : float
        The time; negative times flow toward x⁻.

    Returns
    -------
    FlowState
        The state ``φ^t(w)``, with the same direction.

    Raises
    ------
    NotInteriorError
        If the base point is not interior.

    """
    if t == 0:
        return w
    a, b = chord_of(ctx, w)
    if t > 0:
        a_t, _ = geodesic_step(a, b, t)
        shift = a - a_t
    else:
        b_t, _ = geodesic_step(b, a, -t)
        shift = -(b - b_t)
    return FlowState(w.x + shift * w.direction, w.direction)


def flow_orbit(ctx: MetricContext, w: FlowState, times: np.ndarray) -> List[FlowState]:
    """States ``φ^t(w)`` for each requested time, each computed from ``w``."""
    a, b = chord_of(ctx, w)
    times = np.asarray(times, dtype=float)
    forward = np.where(times >= 0, geodesic_step(a, b, np.abs(times))[0], 0.0)
    backward = np.where(times < 0, geodesic_step(b, a, np.abs(times))[0], 0.0)
    shifts = np.where(times >= 0, a - forward, -(b - backward))
    return [FlowState(w.x + s * w.direction, w.direction) for s in shifts]


def flip(w: FlowState) -> FlowState:
    """The flip ``σ(x, [ξ]) = (x, [-ξ])``."""
    return FlowState(w.x, -w.direction)


def curvature_scalar(ctx: MetricContext, w: FlowState) -> float:
    """Curvature ``½ L²_X̃ (log m) - ¼ (L_X̃ log m)²`` along the flow.

    With ``s = a + b``, ``L_X̃ log m = 2(a - b)/s`` and ``L²_X̃ log m = -8ab/s²``,
    so the value is ``-(a + b)²/s²``.
    """
    a, b = chord_of(ctx, w)
    s = a + b
    first = 2 * (a - b) / s
    second = -8 * a * b / s**2
    return float(0.5 * second - 0.25 * first**2)


def log_m_derivative(ctx: MetricContext, w: FlowState, h: float = 1e-4) -> Tuple[float, float]:
    """Central difference of ``log m`` along the orbit, and the closed form ``2(a - b)/s``."""
    a, b = chord_of(ctx, w)
    values = []
    for state in flow_orbit(ctx, w, np.array([h, -h])):
        a_t, b_t = chord_of(ctx, state)
        values.append(np.log(m_from_chord(a_t, b_t)))
    return float((values[0] - values[1]) / (2 * h)), float(2 * (a - b) / (a + b))


def leading_coefficient(ctx: MetricContext, w: FlowState, t: float = 5.0) -> Tuple[float, float, float]:
    """Leading coefficient of ``x_t x⁺`` as ``t → ∞``.

    The exact flow gives ``x_t x⁺ = a(a + b) / (a + b e^{2t})``, whose
    leading coefficient is ``x⁻x⁺ · xx⁺/xx⁻``. The commonly quoted form
    ``|xx⁺|²/m(w)`` is half of it.

    Returns
    -------
    Tuple[float, float, float]
        ``(measured, predicted, halved_form)`` where ``measured`` is
        ``|x_t x⁺| e^{2t}`` read off the flowed point.

    """
    a, b = chord_of(ctx, w)
    xplus = w.x + a * w.direction
    moved = flow_point(ctx, w, t)
    measured = float(np.linalg.norm(xplus - moved.x) * np.exp(2 * t))
    predicted = (a + b) * a / b
    halved = a**2 / m_from_chord(a, b)
    return measured, float(predicted), float(halved)


def tangent_flow(ctx: MetricContext, z: TangentVector, t: float) -> TangentVector:
    """Push a tangent vector forward by ``dφ^t``.

    In a parallel frame the tangent flow is diagonal: each stable coordinate
    is multiplied by ``e^{-t}`` and each unstable one by ``e^{t}``, times
    the parallel-transport factor of its frame direction; the flow part is
    preserved.
    """
    from hilbert_lab.dynamics.transport import transport_factor

    if t == 0:
        return z
    factors = np.array([transport_factor(ctx, z.base, e, t) for e in z.frame])
    moved = flow_point(ctx, z.base, t)
    return TangentVector(
        moved,
        z.stable_part * np.exp(-t) * factors,
        z.unstable_part * np.exp(t) * factors,
        z.flow_part,
        frame=z.frame,
    )


def sample_states(ctx: MetricContext, rng: np.random.Generator, k: int) -> List[FlowState]:
    """Random flow states with interior base points and uniform directions."""
    require_flow_domain(ctx)
    points = ctx.space.sample_interior(rng, k)
    directions = rng.normal(size=points.shape)
    return [FlowState(x, d) for x, d in zip(points, directions)]
