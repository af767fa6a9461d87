"""Parallel transport along flow orbits and the transverse Lyapunov exponents.

In the normalized adapted chart of an orbit's chord, the horizontal part of
the parallel transport of a transverse vector is a constant euclidean
vector scaled by ``(m(w) m(φ^t w))^{1/2}``. The transport norm
``N(t) = (m_t/m_0)^{1/2} F(x_t, v)/F(x_0, v)`` is therefore computed from
the chord position and the two transverse boundary distances in that chart,
measured around x⁺ so that deep samples keep their precision. Its
exponential growth rate is the exponent ``η``, and ``χ± = ±1 + η``.
"""

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd
from scipy import stats
from scipy.linalg import null_space

from hilbert_lab import const
from hilbert_lab.dynamics.flow import FlowState, chord_of, flip, flow_orbit, transverse_frame
from hilbert_lab.geometry.domain import ConvexDomain
from hilbert_lab.geometry.metric import MetricContext, geodesic_step, m_from_chord
from hilbert_lab.geometry.projective import AffineChart, adapted_chart
from hilbert_lab.group.elements import GroupElement, eigen_data, translation_length
from hilbert_lab.utils.errors import (
    DegenerateDirectionError,
    InsufficientSamplesError,
    InvalidParameterError,
    NoConvergenceError,
    NotInteriorError,
    PrecisionLossError,
)
from hilbert_lab.utils.io import JSONSerializable
from hilbert_lab.utils.logging import get_logger

logger = get_logger("dynamics.transport")


@dataclass
class ExponentEstimate(JSONSerializable):
    """Regression estimate of the transport exponent."""

    eta: float
    chi_plus: float
    chi_minus: float
    stderr: float
    window: List[float]
    samples: int


@dataclass
class OrbitRecord:
    """Samples of the transport norm along one orbit.

    ``chord_plus`` is the distance from the sample to x⁺ and ``finsler`` the
    norm of the constant transverse vector at the sample, both measured in
    the normalized adapted chart (``finsler`` relative to its initial value).
    """

    times: np.ndarray
    points: np.ndarray
    transport_norm: np.ndarray
    stable_norm: np.ndarray
    unstable_norm: np.ndarray
    chord_plus: np.ndarray
    finsler: np.ndarray
    chart: Optional[AffineChart] = None

    def __len__(self) -> int:
        return len(self.times)

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame({"t": self.times})
        for i in range(self.points.shape[1]):
            frame[f"x{i + 1}"] = self.points[:, i]
        frame["transport_norm"] = self.transport_norm
        frame["stable_norm"] = self.stable_norm
        frame["unstable_norm"] = self.unstable_norm
        return frame


####################################################################################################
# TRANSPORT ALONG FLOW ORBITS
####################################################################################################


def transverse_direction(chart: AffineChart, x: np.ndarray, v0: np.ndarray) -> np.ndarray:
    """Chart image of ``v0`` at ``x`` with its chord component removed, normalized."""
    pushed = chart.pushforward(x, np.asarray(v0, dtype=float))
    transverse = pushed.copy()
    transverse[0] = 0.0
    size = np.linalg.norm(transverse)
    if size <= const.COLLINEAR_TOL * max(np.linalg.norm(pushed), 1.0):
        msg = "Transported vector has no component transverse to the chord"
        raise DegenerateDirectionError(msg, {"v0": np.asarray(v0).tolist()})
    return transverse / size


def _chart_offsets(G: np.ndarray, xplus: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Reference offsets from ``xplus`` of chart points ``Y``.

    ``G = [[A, c], [l, d]]`` is the inverse chart with ``xplus`` at the
    origin, applied as ``y ↦ (A y - xplus (l·y)) / (l·y + d)`` so that small
    chart points give small offsets without cancellation.
    """
    A, l, d = G[:-1, :-1], G[-1, :-1], G[-1, -1]
    moved = Y @ l
    return (Y @ A.T - np.outer(moved, xplus)) / (moved + d)[:, None]


def _transverse_exits(
    domain: ConvexDomain, G: np.ndarray, xplus: np.ndarray, u: np.ndarray, v: np.ndarray
) -> np.ndarray:
    """Chart distances from the axis points ``(u, 0, …)`` to the boundary along ``v``."""
    axis = np.zeros((len(u), len(v)))
    axis[:, 0] = u

    def outside(r: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            values = domain.implicit_near(xplus, _chart_offsets(G, xplus, axis + r[:, None] * v))
        return ~(values < 0)

    lo = np.zeros(len(u))
    hi = np.ones(len(u))
    for _ in range(const.BRACKET_DOUBLINGS):
        inside = ~outside(hi)
        if not np.any(inside):
            break
        lo = np.where(inside, hi, lo)
        hi = np.where(inside, 2 * hi, hi)
    else:
        msg = f"Transverse bracketing exceeded {const.BRACKET_DOUBLINGS} doublings"
        raise NoConvergenceError(msg, {"kind": domain.kind})

    for _ in range(const.BISECTION_ITERATIONS):
        mid = 0.5 * (lo + hi)
        out = outside(mid)
        lo = np.where(out, lo, mid)
        hi = np.where(out, mid, hi)
    return 0.5 * (lo + hi)


def _chord_along(a: float, b: float, times: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    forward = geodesic_step(a, b, np.abs(times))
    backward = geodesic_step(b, a, np.abs(times))
    return np.where(times >= 0, forward[0], backward[1]), np.where(times >= 0, forward[1], backward[0])


def _transport(ctx: MetricContext, w: FlowState, v0: np.ndarray, times: np.ndarray) -> OrbitRecord:
    a, b = chord_of(ctx, w)
    xplus = w.x + a * w.direction
    xminus = w.x - b * w.direction
    chart = adapted_chart(ctx.space, xplus, xminus, normalize=True)
    v = transverse_direction(chart, w.x, v0)

    # The chart is projective on the chord: u = a / (a + κ b), exact near x⁺.
    u0 = float(chart.to_chart(w.x)[0])
    kappa = a * (1.0 - u0) / (u0 * b)
    a_t, b_t = _chord_along(a, b, times)
    u = a_t / (a_t + kappa * b_t)
    m = 2.0 * u * (kappa * b_t / (a_t + kappa * b_t))

    if not ctx.space.exact_offsets:
        depth = float(np.min(np.minimum(a_t, b_t))) / (a + b)
        if depth < const.MIN_SCALE:
            logger.warning(f"Orbit samples come within {depth:.1e} of the boundary; transport norms lose precision")

    # Transverse exits are found in the chart, around x⁺, where the depth u
    # keeps its relative precision.
    G = np.linalg.inv(chart.homography.matrix)
    r_plus = _transverse_exits(ctx.space, G, xplus, u, v)
    r_minus = _transverse_exits(ctx.space, G, xplus, u, -v)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        finsler = 0.5 * (1.0 / r_plus + 1.0 / r_minus)
        norms = np.sqrt(m / m[0]) * finsler / finsler[0]
    if not np.all(np.isfinite(norms)) or np.any(norms <= 0):
        bad = int(np.argmin(np.isfinite(norms) & (norms > 0)))
        msg = f"Transport norm is not representable at t={times[bad]:.4g}"
        raise PrecisionLossError(msg, {"depth": float(u[bad]), "kind": ctx.space.kind})

    X = np.vstack([state.x for state in flow_orbit(ctx, w, times)])
    return OrbitRecord(
        times=times,
        points=X,
        transport_norm=norms,
        stable_norm=np.exp(-times) * norms,
        unstable_norm=np.exp(times) * norms,
        chord_plus=u,
        finsler=finsler / finsler[0],
        chart=chart,
    )


def transport_norm_curve(
    ctx: MetricContext,
    w: FlowState,
    v0: np.ndarray,
    horizon: float,
    steps: int = 200,
) -> OrbitRecord:
    """Transport norm of a transverse vector along the orbit of ``w``.

    Parameters
    ----------
    ctx : MetricContext
        The metric context; the domain must support the flow.
    w : FlowState
        The initial state.
    v0 : np.ndarray
        A vector at ``w.x`` in the context chart, not parallel to the chord.
    horizon : float
        The final time.
    steps : int
        Number of time steps; ``steps + 1`` samples are recorded.

    Returns
    -------
    OrbitRecord
        Samples at equally spaced times in ``[0, horizon]``, normalized so
        that the transport norm is 1 at time 0.

    Raises
    ------
    ChartFailureError
        If the adapted chart cannot be built.
    DegenerateDirectionError
        If ``v0`` has no component transverse to the chord.

    """
    if horizon <= 0 or steps < 1:
        msg = f"Transport needs a positive horizon and steps, got {horizon} and {steps}"
        raise InvalidParameterError(msg)
    times = np.linspace(0.0, horizon, steps + 1)
    record = _transport(ctx, w, v0, times)
    logger.debug(f"Transport curve over [0, {horizon}] with {len(record)} samples")
    return record


def transport_factor(ctx: MetricContext, w: FlowState, v: np.ndarray, t: float) -> float:
    """Transport norm ``N(t)`` of ``v`` along the orbit of ``w`` at a single time."""
    return float(_transport(ctx, w, v, np.array([0.0, t])).transport_norm[1])


####################################################################################################
# EXPONENTS
####################################################################################################


def eta_estimate(record: OrbitRecord, transient_fraction: float = const.TRANSIENT_FRACTION) -> ExponentEstimate:
    """Least-squares slope of ``log N`` against ``t`` after the transient.

    Parameters
    ----------
    record : OrbitRecord
        The samples.
    transient_fraction : float
        Leading fraction of the samples left out of the fit.

    Returns
    -------
    ExponentEstimate
        ``η``, ``χ± = ±1 + η``, the slope standard error and the fit window.

    Raises
    ------
    InsufficientSamplesError
        With fewer than 20 samples or a horizon shorter than 5.

    """
    times = np.asarray(record.times, dtype=float)
    if len(times) < const.MIN_RECORD_SAMPLES or times[-1] - times[0] < const.MIN_RECORD_HORIZON:
        msg = (
            f"Exponent fit needs {const.MIN_RECORD_SAMPLES} samples over a horizon of "
            f"{const.MIN_RECORD_HORIZON}, got {len(times)} over {times[-1] - times[0]:.3g}"
        )
        raise InsufficientSamplesError(msg)

    start = int(np.ceil(transient_fraction * len(times)))
    fit = stats.linregress(times[start:], np.log(record.transport_norm[start:]))
    eta = float(fit.slope)
    if abs(eta) >= 1:
        logger.warning(f"Transport exponent {eta:.4f} outside (-1, 1)")
    return ExponentEstimate(
        eta=eta,
        chi_plus=1.0 + eta,
        chi_minus=-1.0 + eta,
        stderr=float(fit.stderr),
        window=[float(times[start]), float(times[-1])],
        samples=len(times) - start,
    )


def anosov_rates(
    ctx: MetricContext,
    w: FlowState,
    horizon: float = 10.0,
    steps: int = 200,
    v0: Optional[np.ndarray] = None,
) -> Tuple[float, float]:
    """Contraction rates ``(α, β)`` of the stable and unstable bundles along an orbit.

    ``α = 1 - η(w)`` is the decay rate of stable norms; unstable norms
    decay in backward time along ``w`` as stable norms do along the flipped
    orbit, so ``β = 1 - η(σw)``.
    """
    if v0 is None:
        v0 = transverse_frame(w.direction)[0]
    forward = eta_estimate(transport_norm_curve(ctx, w, v0, horizon, steps))
    backward = eta_estimate(transport_norm_curve(ctx, flip(w), v0, horizon, steps))
    alpha = 1.0 - forward.eta
    beta = 1.0 - backward.eta
    if min(alpha, beta) <= 0:
        logger.warning(f"Non-positive contraction rate (alpha={alpha:.4f}, beta={beta:.4f})")
    return alpha, beta


def transport_ratio_band(record: OrbitRecord) -> Tuple[float, float]:
    """Range of ``N(t) / (|x_t x⁺|^{1/2} (1/x_t y_t⁺ + 1/x_t y_t⁻))``, normalized at t = 0.

    The transverse distances ``x_t y_t±`` enter through the Finsler norm of
    the constant chart vector; the band stays bounded along the orbit.
    """
    ratio = record.transport_norm / (np.sqrt(record.chord_plus) * record.finsler)
    ratio = ratio / ratio[0]
    return float(np.min(ratio)), float(np.max(ratio))


####################################################################################################
# PERIODIC ORBITS
####################################################################################################


def periodic_transport_curve(
    g: GroupElement,
    periods: int = 20,
    direction: int = 1,
    start: float = 0.5,
) -> OrbitRecord:
    """Transport norm along the axis of a biproximal element, sampled once per period.

    In the chart given by the eigenbasis, with ``γ⁺`` at 0 and ``γ⁻`` at 1
    on the first axis, ``g`` moves the axis point ``(a, b)`` to
    ``(λ_n a, λ₀ b) / (λ_n a + λ₀ b)`` and scales the eigen-direction ``i``
    by ``|λ_i| / (λ_n a + λ₀ b)``. Invariance of the Finsler norm then gives
    the transport norm at every multiple of the translation length exactly,
    without knowledge of the invariant domain.

    Parameters
    ----------
    g : GroupElement
        A biproximal element.
    periods : int
        The number of periods.
    direction : int
        Index of the intermediate eigenvalue (by decreasing modulus) whose
        eigen-direction is transported; complex eigenvalues enter through
        their modulus.
    start : float
        Initial position on the axis, in (0, 1).

    Raises
    ------
    NotBiproximalError
        If ``g`` is not biproximal.
    InvalidParameterError
        If ``direction`` is not an intermediate index or ``start`` is outside (0, 1).

    """
    length = translation_length(g)
    moduli = eigen_data(g).moduli
    n = g.dimension
    if not 1 <= direction <= n - 1:
        msg = f"Eigen-direction index must lie in [1, {n - 1}], got {direction}"
        raise InvalidParameterError(msg)
    if not 0 < start < 1 or periods < 1:
        msg = f"Need 0 < start < 1 and periods >= 1, got {start} and {periods}"
        raise InvalidParameterError(msg)

    log_top, log_mid, log_bottom = np.log(moduli[0]), np.log(moduli[direction]), np.log(moduli[-1])
    log_a = np.empty(periods + 1)
    log_b = np.empty(periods + 1)
    log_scale = np.zeros(periods + 1)
    log_a[0], log_b[0] = np.log(start), np.log1p(-start)
    for k in range(1, periods + 1):
        log_denom = np.logaddexp(log_bottom + log_a[k - 1], log_top + log_b[k - 1])
        log_a[k] = log_a[k - 1] + log_bottom - log_denom
        log_b[k] = log_b[k - 1] + log_top - log_denom
        log_scale[k] = log_scale[k - 1] + log_mid - log_denom

    times = length * np.arange(periods + 1)
    log_norm = 0.5 * (log_a + log_b - log_a[0] - log_b[0]) - log_scale
    points = np.zeros((periods + 1, n))
    points[:, 0] = np.exp(log_a)
    return OrbitRecord(
        times=times,
        points=points,
        transport_norm=np.exp(log_norm),
        stable_norm=np.exp(log_norm - times),
        unstable_norm=np.exp(log_norm + times),
        chord_plus=np.exp(log_a),
        finsler=np.exp(-log_scale),
    )


def _axis_frame(ctx: MetricContext, g: GroupElement) -> np.ndarray:
    """Eigenbasis ``E = [γ⁺, middle block, γ⁻]`` with both fixed points lifted into the domain's cone."""
    data = eigen_data(g)
    middle = null_space(np.vstack([data.top_covector, data.bottom_covector]))
    E = np.column_stack([data.top_vector.coords, middle, data.bottom_vector.coords])
    for _ in range(2):
        mid = E[:, 0] / np.linalg.norm(E[:, 0]) + E[:, -1] / np.linalg.norm(E[:, -1])
        if abs(mid[-1]) > const.ZERO_VECTOR_TOL and ctx.space.contains(mid[:-1] / mid[-1]):
            return E
        E[:, -1] = -E[:, -1]
    msg = "The axis of the element does not cross the domain"
    raise NotInteriorError(msg, {"word": g.word})


def axis_transport_curve(
    ctx: MetricContext,
    g: GroupElement,
    periods: int = 100,
    samples_per_period: int = 8,
    start: float = 0.5,
) -> OrbitRecord:
    """Transport norm along the axis of ``g`` inside a ``g``-invariant domain.

    ``g`` acts in the coordinates of ``ctx.space``. In the chart
    ``(u, z) ↦ E (1 - u, z, u)`` built on the eigenbasis ``E``, the axis is
    the segment from ``γ⁺`` at ``u = 0`` to ``γ⁻`` at ``u = 1`` and the
    tangent hyperplanes at its ends are ``{u = 0}`` and ``{u = 1}``; the
    transported vector is the constant transverse vector ``v``. A sample at
    ``t = kℓ + s`` is moved back by ``g^{-k}`` to the axis point at time
    ``s``, where ``g^{-k}`` sends ``v`` to ``B^{-k} v / D_k`` with ``B`` the
    middle block of ``g`` and ``D_k = λ₀^{-k} (1 - u_t) + λ_n^{-k} u_t``.
    The Finsler norm is then measured in the domain within the first period
    of the orbit only, so an approximate domain such as a hull is resolved
    along the whole record.

    Parameters
    ----------
    ctx : MetricContext
        The context of a domain preserved by ``g``.
    g : GroupElement
        A biproximal element.
    periods : int
        Number of periods recorded.
    samples_per_period : int
        Samples per translation length.
    start : float
        Initial position on the axis, in (0, 1).

    Returns
    -------
    OrbitRecord
        The samples, normalized so that the transport norm is 1 at time 0.

    Raises
    ------
    NotBiproximalError
        If ``g`` is not biproximal.
    NotInteriorError
        If the axis does not cross the domain.

    """
    if not 0 < start < 1 or periods < 1 or samples_per_period < 1:
        msg = f"Need 0 < start < 1 and positive sample counts, got {start}, {periods}, {samples_per_period}"
        raise InvalidParameterError(msg)
    length = translation_length(g)
    E = _axis_frame(ctx, g)
    block = np.linalg.solve(E, g.matrix @ E)
    moduli = np.abs(np.diag(block)[[0, -1]])
    step_back = np.linalg.inv(block[1:-1, 1:-1])

    index = np.arange(periods * samples_per_period + 1)
    k = index // samples_per_period
    times = length * index / samples_per_period
    phase = length * (index % samples_per_period) / samples_per_period
    u = geodesic_step(start, 1.0 - start, times)[0]
    m = m_from_chord(u, 1.0 - u)

    # B^{-k} v, renormalized at every step.
    v = np.zeros(g.dimension - 1)
    v[0] = 1.0
    log_size = np.zeros(periods + 1)
    directions = np.empty((periods + 1, len(v)))
    directions[0] = v
    for j in range(1, periods + 1):
        v = step_back @ v
        size = np.linalg.norm(v)
        v = v / size
        log_size[j] = log_size[j - 1] + np.log(size)
        directions[j] = v
    log_denom = np.logaddexp(-k * np.log(moduli[0]) + np.log1p(-u), -k * np.log(moduli[1]) + np.log(u))

    # Pulled-back states, all within the first period, in the domain's coordinates.
    u_back = geodesic_step(start, 1.0 - start, phase)[0]
    M = np.eye(g.dimension + 1)
    M[0], M[-1] = M[-1].copy(), M[0] + M[-1]
    inverse = E @ np.linalg.inv(M)
    A, c, l, d = inverse[:-1, :-1], inverse[:-1, -1], inverse[-1, :-1], inverse[-1, -1]
    Y = np.zeros((len(index), g.dimension))
    Y[:, 0] = u_back
    V = np.zeros_like(Y)
    V[:, 1:] = directions[k]
    denom = Y @ l + d
    X = (Y @ A.T + c) / denom[:, None]
    W = (V @ A.T - X * (V @ l)[:, None]) / denom[:, None]
    size = np.linalg.norm(W, axis=1)
    ra, rb = ctx.space.chord_distances(X, W / size[:, None])
    log_finsler = np.log(0.5 * size * (1.0 / ra + 1.0 / rb)) + log_size[k] - log_denom

    log_norm = 0.5 * np.log(m / m[0]) + log_finsler - log_finsler[0]
    if not np.all(np.isfinite(log_norm)):
        msg = "Axis transport norm is not representable"
        raise PrecisionLossError(msg, {"word": g.word})
    Y[:, 0] = u
    points = (Y @ A.T + c) / (Y @ l + d)[:, None]
    return OrbitRecord(
        times=times,
        points=points,
        transport_norm=np.exp(log_norm),
        stable_norm=np.exp(log_norm - times),
        unstable_norm=np.exp(log_norm + times),
        chord_plus=u,
        finsler=np.exp(log_finsler - log_finsler[0]),
    )
