"""Local shape of the boundary: chord-end exponents and β-convexity."""

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import stats
from scipy.linalg import null_space

from hilbert_lab import const
from hilbert_lab.dynamics.transport import transverse_direction
from hilbert_lab.geometry.domain import ConvexDomain
from hilbert_lab.geometry.metric import MetricContext
from hilbert_lab.geometry.projective import adapted_chart
from hilbert_lab.utils.errors import (
    InsufficientSamplesError,
    InvalidBetaError,
    InvalidParameterError,
    NoConvergenceError,
    NonSmoothPointError,
    ScaleUnderflowError,
    TangentUnavailableError,
)
from hilbert_lab.utils.io import JSONSerializable
from hilbert_lab.utils.logging import get_logger

logger = get_logger("boundary.shape")

# Angular offsets (radians, as seen from the center) between a base point and its neighbours.
NEIGHBOUR_OFFSETS = np.geomspace(0.2, 2e-4, 12)

# Tangent gaps below this are at the resolution of the boundary oracle.
MIN_TANGENT_GAP = 1e-11


@dataclass
class ShapeExponent(JSONSerializable):
    """Exponent ``e`` of ``y±(x) ≍ x^e`` at a chord end, with ``η = 2e - 1``."""

    exponent: float
    stderr: float
    eta: float
    scales: List[float] = field(default_factory=list)
    y_plus: List[float] = field(default_factory=list)
    y_minus: List[float] = field(default_factory=list)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"scale": self.scales, "y_plus": self.y_plus, "y_minus": self.y_minus})


def _tangent_normal(domain: ConvexDomain, p: np.ndarray) -> np.ndarray:
    try:
        return domain.boundary_tangent(p).normal
    except (NonSmoothPointError, NoConvergenceError) as e:
        msg = "Boundary tangent unavailable"
        raise TangentUnavailableError(msg, {"p": np.asarray(p).tolist(), "reason": str(e)}) from e


####################################################################################################
# CHORD-END EXPONENTS
####################################################################################################


def shape_exponent(
    domain: ConvexDomain,
    xplus: np.ndarray,
    v: Optional[np.ndarray] = None,
    scales: Optional[Sequence[float]] = None,
    xminus: Optional[np.ndarray] = None,
) -> ShapeExponent:
    """Measure how the boundary leaves the tangent hyperplane at a chord end.

    In the normalized chart adapted to the chord from ``xplus`` to
    ``xminus`` the chord is ``[0, 1]`` on the first axis. At each scale
    ``x`` the distances ``y±`` from ``(x, 0, …)`` to the boundary along
    ``±v`` are measured, and the exponent is the slope of
    ``½ (log y⁺ + log y⁻)`` against ``log x``.

    Parameters
    ----------
    domain : ConvexDomain
        A strictly convex domain with C¹ boundary at ``xplus``.
    xplus : np.ndarray
        The boundary point.
    v : Optional[np.ndarray]
        Tangent direction at ``xplus``; the first tangent axis by default.
    scales : Optional[Sequence[float]]
        Chord positions; the default grid is ``2^-k`` for ``k = 4..24``,
        fitted on ``k >= 10``. Given scales are all fitted.
    xminus : Optional[np.ndarray]
        Other end of the chord, by default the exit along the inward normal.

    Returns
    -------
    ShapeExponent
        The exponent, its regression error and the table of sampled scales.

    Raises
    ------
    TangentUnavailableError
        If the tangent at an endpoint is unavailable.
    ScaleUnderflowError
        If a scale is below 1e-10.

    """
    xplus = np.asarray(xplus, dtype=float)
    normal = _tangent_normal(domain, xplus)
    if xminus is None:
        xminus = xplus - domain.ray_exit(xplus, -normal) * normal
    if v is None:
        v = null_space(normal[None, :])[:, 0]

    if scales is None:
        heights = 2.0 ** -np.array(const.SCALE_EXPONENTS, dtype=float)
        fitted = heights <= 2.0 ** -min(const.FIT_EXPONENTS)
    else:
        heights = np.asarray(scales, dtype=float)
        fitted = np.ones(len(heights), dtype=bool)
    if np.any(heights < const.MIN_SCALE) or np.any(heights >= 1):
        msg = f"Scales must lie in [{const.MIN_SCALE:.0e}, 1)"
        raise ScaleUnderflowError(msg, {"smallest": float(heights.min())})

    chart = adapted_chart(domain, xplus, xminus, normalize=True)
    direction = transverse_direction(chart, xplus, v)
    space = MetricContext(domain, chart).space

    points = np.zeros((len(heights), domain.dimension))
    points[:, 0] = heights
    y_plus = space.ray_exit(points, direction)
    y_minus = space.ray_exit(points, -direction)

    x = np.log(heights[fitted])
    y = 0.5 * (np.log(y_plus[fitted]) + np.log(y_minus[fitted]))
    if len(x) < 3:
        msg = "A shape exponent needs at least 3 scales"
        raise InsufficientSamplesError(msg, {"scales": len(x)})
    fit = stats.linregress(x, y)
    exponent = float(fit.slope)
    if not 0 < exponent < 1:
        logger.warning(f"Shape exponent {exponent:.4f} outside (0, 1); the boundary may not be C¹ and strictly convex here")
    logger.debug(f"Shape exponent {exponent:.5f} ± {fit.stderr:.2e} at {xplus.tolist()}")
    return ShapeExponent(
        exponent=exponent,
        stderr=float(fit.stderr),
        eta=2 * exponent - 1,
        scales=heights.tolist(),
        y_plus=y_plus.tolist(),
        y_minus=y_minus.tolist(),
    )


####################################################################################################
# β-CONVEXITY
####################################################################################################


def _base_directions(n: int, count: int) -> np.ndarray:
    """Directions from the center: a regular angular grid in 2D, a spiral plus the axes in 3D."""
    if n == 2:
        count = 8 * int(np.ceil(count / 8))
        theta = 2 * np.pi * np.arange(count) / count
        return np.column_stack([np.cos(theta), np.sin(theta)])
    k = np.arange(count) + 0.5
    z = 1 - 2 * k / count
    phi = np.pi * (1 + np.sqrt(5)) * k
    r = np.sqrt(1 - z**2)
    spiral = np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
    return np.vstack([np.eye(n), -np.eye(n), spiral])


def local_convexity_exponents(
    domain: ConvexDomain,
    sample_pairs: int = const.BETA_PAIRS,
    max_separation: float = const.BETA_MAX_SEPARATION,
) -> pd.DataFrame:
    """Per base point, the slope of ``log d(p', T_p ∂Ω)`` against ``log |pp'|``.

    Returns
    -------
    pd.DataFrame
        Columns ``x1..xn`` (the base point), ``exponent`` and ``pairs``.

    Raises
    ------
    InsufficientSamplesError
        If no base point has three usable neighbours.

    """
    if sample_pairs < 1 or not 0 < max_separation <= 1:
        msg = "Need a positive pair count and a separation window in (0, 1]"
        raise InvalidParameterError(msg, {"sample_pairs": sample_pairs, "max_separation": max_separation})
    n = domain.dimension
    sweeps_per_base = 2 * (n - 1) * len(NEIGHBOUR_OFFSETS)
    bases = _base_directions(n, max(8, int(np.ceil(sample_pairs / sweeps_per_base))))

    rows = []
    for u in bases:
        p = domain.boundary_point(u)
        normal = _tangent_normal(domain, p)
        tangents = null_space(u[None, :]).T
        sweeps = np.vstack([tangents, -tangents])
        neighbours = np.vstack(
            [np.cos(d) * u + np.sin(d) * w for w in sweeps for d in NEIGHBOUR_OFFSETS]
        )
        q = domain.center + domain.ray_exit(domain.center, neighbours)[:, None] * neighbours
        separation = np.linalg.norm(q - p, axis=1)
        gap = -((q - p) @ normal)
        keep = (
            (separation >= const.BETA_MIN_SEPARATION)
            & (separation <= max_separation)
            & (gap > MIN_TANGENT_GAP)
        )
        if keep.sum() < 3:
            continue
        fit = stats.linregress(np.log(separation[keep]), np.log(gap[keep]))
        rows.append([*p, float(fit.slope), int(keep.sum())])

    if not rows:
        msg = "No boundary point had enough neighbours within the separation window"
        raise InsufficientSamplesError(msg, {"max_separation": max_separation})
    return pd.DataFrame(rows, columns=[*(f"x{i + 1}" for i in range(n)), "exponent", "pairs"])


def beta_convexity(
    domain: ConvexDomain,
    sample_pairs: int = const.BETA_PAIRS,
    max_separation: float = const.BETA_MAX_SEPARATION,
) -> Tuple[float, float]:
    """Estimate the convexity exponent ``β`` and the dual regularity ``α``.

    ``β`` is the largest local exponent over the sampled boundary points;
    as a sampled maximum it is a lower estimate of the true value.
    ``α = β / (β - 1)`` so that ``1/α + 1/β = 1``.

    Raises
    ------
    TangentUnavailableError
        If a sampled boundary point has no tangent.

    """
    return beta_from_exponents(local_convexity_exponents(domain, sample_pairs, max_separation))


def beta_from_exponents(table: pd.DataFrame) -> Tuple[float, float]:
    """``(β, α)`` from a table of local convexity exponents.

    Raises
    ------
    InvalidParameterError
        If the largest exponent is at most 1, where ``α = β / (β - 1)`` is undefined.

    """
    beta = float(table["exponent"].max())
    if not beta > 1.0:
        msg = f"Convexity exponent must exceed 1 to have a conjugate, got {beta}"
        raise InvalidParameterError(msg, {"beta": beta})
    alpha = beta / (beta - 1.0)
    logger.info(f"beta = {beta:.4f}, alpha = {alpha:.4f} from {int(table['pairs'].sum())} pairs")
    return beta, alpha


def entropy_lower_bound(beta: float, n: int) -> float:
    """Lower bound ``(2/β)(n - 1)`` on the entropy of a β-convex divisible domain.

    Estimates within the tolerance below 2 are treated as 2.

    Raises
    ------
    InvalidBetaError
        If ``beta`` is below 2 by more than the tolerance.

    """
    if n < 2:
        msg = f"Dimension must be at least 2, got {n}"
        raise InvalidParameterError(msg)
    if beta < 2 - const.BETA_TOLERANCE:
        msg = f"Convexity exponent must be at least 2, got {beta}"
        raise InvalidBetaError(msg, {"beta": beta})
    return 2.0 / max(beta, 2.0) * (n - 1)
