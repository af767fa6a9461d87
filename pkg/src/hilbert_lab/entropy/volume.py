"""Volume entropy from the growth of Hilbert balls.

Balls are star-shaped around their center and the Hilbert distance along
a ray has a closed form, so ``vol B(x0, r)`` is integrated in polar
coordinates whose radial variable is the Hilbert radius ``s``: the
euclidean radius is ``ρ(s) = xx⁺ - a_s`` with ``a_s`` from the exact
flow, and

    vol B(x0, r) = ∫_{S^{n-1}} ∫_0^r μ(x0 + ρ(s) u) ρ(s)^{n-1} ρ'(s) ds du,

with ``μ`` the Busemann-Hausdorff density. The integral is sampled with
one jittered point per cell of a (direction × radius) grid whose radius
strata align with the output radii. Near a corner of a planar boundary
the integrand grows like the inverse angle to the corner, so those cells
are importance sampled.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd

from hilbert_lab import const
from hilbert_lab.geometry.domain import ConvexDomain
from hilbert_lab.geometry.metric import MetricContext, geodesic_step, volume_densities
from hilbert_lab.utils.errors import (
    InvalidParameterError,
    MonteCarloVarianceError,
    UnsupportedDimensionError,
)
from hilbert_lab.utils.io import JSONSerializable
from hilbert_lab.utils.logging import get_logger

logger = get_logger("entropy.volume")


@dataclass
class EntropyEstimate(JSONSerializable):
    """Fitted entropy with the sample grid it was fitted on.

    ``grid`` holds radii (volume growth) or length cutoffs (orbit
    counting) and ``counts`` the matching ball volumes or orbit counts.
    """

    value: float
    method: str
    fit_stderr: float
    grid: List[float] = field(default_factory=list)
    counts: List[float] = field(default_factory=list)
    window: List[float] = field(default_factory=list)
    polynomial_order: Optional[float] = None
    relative_error: Optional[float] = None
    orientation: Optional[str] = None

    def to_frame(self) -> pd.DataFrame:
        if self.method == "volume_growth":
            return pd.DataFrame({"r": self.grid, "volume": self.counts})
        return pd.DataFrame({"T": self.grid, "P_T": self.counts})


####################################################################################################
# SAMPLING
####################################################################################################

# Independent batches behind the relative error of each ball volume.
VOLUME_BATCHES = 8
# Smallest angle to a corner resolved at radius r, in units of e^{-2r}.
CORNER_FLOOR = 1e-4


def _planar_cells(cells: int, corner_angles: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Angular cells ``[left, left + width)`` with corner directions as cell boundaries.

    ``anchor`` is +1 for a cell whose left end is a corner, -1 for a corner
    at the right end only and 0 otherwise. Two adjacent corners are split
    by their bisector.
    """
    corners = np.unique(np.mod(corner_angles, 2 * np.pi))
    grid = 2 * np.pi * np.arange(cells) / cells
    if len(corners):
        near = np.abs(np.angle(np.exp(1j * (grid[:, None] - corners[None, :])))).min(axis=1)
        grid = grid[near > 0.5 * np.pi / cells]
    left = np.concatenate([grid, corners])
    is_corner = np.concatenate([np.zeros(len(grid), dtype=bool), np.ones(len(corners), dtype=bool)])
    order = np.argsort(left)
    left, is_corner = left[order], is_corner[order]

    right = np.append(left[1:], left[0] + 2 * np.pi)
    paired = is_corner & np.roll(is_corner, -1)
    if np.any(paired):
        left = np.concatenate([left, np.mod(0.5 * (left + right)[paired], 2 * np.pi)])
        is_corner = np.concatenate([is_corner, np.zeros(int(paired.sum()), dtype=bool)])
        order = np.argsort(left)
        left, is_corner = left[order], is_corner[order]
        right = np.append(left[1:], left[0] + 2 * np.pi)

    anchor = np.where(is_corner, 1, np.where(np.roll(is_corner, -1), -1, 0))
    return left, right - left, anchor


def _stratified_directions(
    domain: ConvexDomain,
    x0: np.ndarray,
    cells: int,
    columns: int,
    floor: float,
    rng: np.random.Generator,
) -> Tuple[np.ndarray, np.ndarray]:
    """Jittered unit directions for every (direction cell, radius cell) pair.

    Returns
    -------
    Tuple[np.ndarray, np.ndarray]
        Directions of shape (k, columns, n) and their direction measures of
        shape (k, columns). Planar cells next to a corner are sampled
        log-uniformly in the angle to it, down to ``floor``, and carry the
        matching importance weight.

    """
    if domain.dimension == 2:
        corners = domain.corner_points()
        angles = np.empty(0) if corners is None else np.arctan2(*(corners - x0).T[::-1])
        left, width, anchor = _planar_cells(cells, angles)
        u = rng.uniform(size=(len(left), columns))
        w = width[:, None]
        span = np.log(w / floor)
        delta = floor * np.exp(u * span)
        offset = np.where(anchor[:, None] > 0, delta, np.where(anchor[:, None] < 0, w - delta, u * w))
        measure = np.where(anchor[:, None] != 0, delta * span, np.broadcast_to(w, u.shape))
        theta = left[:, None] + offset
        return np.stack([np.cos(theta), np.sin(theta)], axis=-1), measure

    n_z = max(1, int(round(np.sqrt(cells / 2))))
    n_phi = 2 * n_z
    i, j = np.meshgrid(np.arange(n_z), np.arange(n_phi), indexing="ij")
    z = -1 + 2 * (i.reshape(-1, 1) + rng.uniform(size=(i.size, columns))) / n_z
    phi = 2 * np.pi * (j.reshape(-1, 1) + rng.uniform(size=(j.size, columns))) / n_phi
    r = np.sqrt(1 - z**2)
    directions = np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=-1)
    return directions, np.full(z.shape, 4 * np.pi / (n_z * n_phi))


def _batch_labels(rows: int, columns: int, batches: int, rng: np.random.Generator) -> np.ndarray:
    """Random batch of each cell; every block of ``batches`` consecutive rows meets each batch once per column."""
    blocks = -(-rows // batches)
    keys = rng.uniform(size=(blocks, batches, columns))
    ranks = np.argsort(np.argsort(keys, axis=1), axis=1)
    return ranks.reshape(blocks * batches, columns)[:rows]


def ball_volumes(
    ctx: MetricContext,
    x0: np.ndarray,
    r_max: float,
    radii: int,
    samples: int,
    rng: np.random.Generator,
    density_samples: Optional[int] = None,
    threads: int = 1,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Volumes of ``B(x0, r)`` on the grid ``r_j = r_max j / radii``.

    Returns
    -------
    Tuple[np.ndarray, np.ndarray, np.ndarray]
        The radii, the volumes and their relative errors. The errors are
        the standard errors over ``VOLUME_BATCHES`` random groups of cells,
        each group a coarser stratified estimate of the same volume.

    """
    n = ctx.dimension
    per_radius = max(1, int(round(np.sqrt(samples) / radii)))
    s_cells = radii * per_radius
    d_cells = max(VOLUME_BATCHES, int(np.ceil(samples / s_cells)))

    floor = CORNER_FLOOR * np.exp(-2.0 * r_max)
    directions, measure = _stratified_directions(ctx.space, x0, d_cells, s_cells, floor, rng)
    k = len(directions)
    s = r_max * (np.arange(s_cells)[None, :] + rng.uniform(size=(k, s_cells))) / s_cells
    labels = _batch_labels(k, s_cells, VOLUME_BATCHES, rng)
    samples_per_density = density_samples or _density_samples(n)
    chunks = np.array_split(np.arange(k), max(1, threads))
    with ThreadPoolExecutor(max_workers=max(1, threads)) as executor:
        parts = executor.map(
            lambda idx: _cell_values(ctx, x0, directions[idx], s[idx], samples_per_density),
            [idx for idx in chunks if len(idx)],
        )
        cell = np.vstack(list(parts)) * measure * (r_max / s_cells)

    ends = per_radius * np.arange(1, radii + 1) - 1
    total = np.cumsum(cell.sum(axis=0))[ends]
    estimates = VOLUME_BATCHES * np.stack(
        [np.cumsum(np.where(labels == b, cell, 0.0).sum(axis=0))[ends] for b in range(VOLUME_BATCHES)]
    )
    relative = estimates.std(axis=0, ddof=1) / np.sqrt(VOLUME_BATCHES) / total
    grid = r_max * np.arange(1, radii + 1) / radii
    return grid, total, relative


def _cell_values(
    ctx: MetricContext,
    x0: np.ndarray,
    directions: np.ndarray,
    s: np.ndarray,
    density_samples: int,
) -> np.ndarray:
    """Polar integrand at Hilbert radii ``s`` along directions of shape ``s.shape + (n,)``."""
    n = ctx.dimension
    flat = directions.reshape(-1, n)
    forward, backward = ctx.space.chord_distances(np.broadcast_to(x0, flat.shape), flat)
    R = forward.reshape(s.shape)
    B = backward.reshape(s.shape)
    a_s, _ = geodesic_step(R, B, s)
    rho = R - a_s
    decay = np.exp(-2 * s)
    speed = 2 * decay * R * B * (R + B) / (R * decay + B) ** 2
    points = x0 + (rho[..., None] * directions).reshape(-1, n)
    density = volume_densities(ctx, points, density_samples).reshape(s.shape)
    return density * rho ** (n - 1) * speed


def _density_samples(n: int) -> int:
    return const.MC_DENSITY_SAMPLES_2D if n == 2 else const.MC_DENSITY_SAMPLES_3D


####################################################################################################
# FIT
####################################################################################################


def _growth_fit(r: np.ndarray, log_volume: np.ndarray, polynomial: bool) -> Tuple[float, float, Optional[float]]:
    """Least squares of ``log vol = h r (+ p log r) + c``; returns ``(h, stderr, p)``."""
    columns = [r, np.log(r), np.ones_like(r)] if polynomial else [r, np.ones_like(r)]
    X = np.column_stack(columns)
    coef, _, _, _ = np.linalg.lstsq(X, log_volume, rcond=None)
    dof = len(r) - X.shape[1]
    residual = log_volume - X @ coef
    if dof > 0:
        sigma2 = float(residual @ residual) / dof
        stderr = float(np.sqrt(sigma2 * np.linalg.inv(X.T @ X)[0, 0]))
    else:
        stderr = 0.0
    return float(coef[0]), stderr, (float(coef[1]) if polynomial else None)


def volume_entropy(
    ctx: MetricContext,
    x0: Optional[np.ndarray] = None,
    r_max: float = 10.0,
    samples: int = const.MC_SAMPLES_PER_BALL,
    radii: int = 16,
    rng: Optional[np.random.Generator] = None,
    polynomial_correction: bool = False,
    density_samples: Optional[int] = None,
    threads: int = 1,
) -> EntropyEstimate:
    """Exponential growth rate of Hilbert ball volumes.

    Parameters
    ----------
    ctx : MetricContext
        The metric context, in dimension 2 or 3.
    x0 : Optional[np.ndarray]
        Ball center, the domain center by default.
    r_max : float
        Largest radius, at least 4.
    samples : int
        Number of sample cells.
    radii : int
        Number of radii in the grid ``(0, r_max]``.
    rng : Optional[np.random.Generator]
        Jitter source; a fixed seed is used when omitted.
    polynomial_correction : bool
        Whether the fit carries a ``log r`` term, for domains such as
        polytopes whose balls grow polynomially.
    density_samples : Optional[int]
        Quadrature size of each volume density.
    threads : int
        Worker threads over the direction cells.

    Returns
    -------
    EntropyEstimate
        The slope on the upper half of the radius grid. ``fit_stderr``
        combines the regression error, the change of slope when the
        window shrinks to the upper third and the sampling error.

    Raises
    ------
    UnsupportedDimensionError
        Outside dimensions 2 and 3.
    MonteCarloVarianceError
        If a ball volume in the fit window has a relative error above 10%.

    """
    n = ctx.dimension
    if n not in const.SUPPORTED_VOLUME_DIMENSIONS:
        msg = f"Volume entropy is available in dimensions 2 and 3, not {n}"
        raise UnsupportedDimensionError(msg)
    if r_max < const.MIN_VOLUME_RADIUS or radii < 6 or samples < radii:
        msg = f"Need r_max >= {const.MIN_VOLUME_RADIUS}, at least 6 radii and one sample per radius"
        raise InvalidParameterError(msg, {"r_max": r_max, "radii": radii, "samples": samples})
    x0 = ctx.space.center if x0 is None else np.asarray(x0, dtype=float)
    ctx.require_interior(x0)
    rng = rng if rng is not None else np.random.default_rng(0)

    grid, volumes, relative = ball_volumes(ctx, x0, r_max, radii, samples, rng, density_samples, threads)
    upper = grid >= r_max / 2
    worst = float(relative[upper].max())
    if worst > const.MC_MAX_RELATIVE_ERROR:
        msg = f"Ball volume relative error {worst:.1%} exceeds {const.MC_MAX_RELATIVE_ERROR:.0%}"
        raise MonteCarloVarianceError(msg, {"samples": samples})

    log_volume = np.log(volumes)
    h, stderr, order = _growth_fit(grid[upper], log_volume[upper], polynomial_correction)
    third = grid >= 2 * r_max / 3
    h_third, _, _ = _growth_fit(grid[third], log_volume[third], polynomial_correction)
    sampling = worst / (grid[upper][-1] - grid[upper][0])
    fit_stderr = float(np.sqrt(stderr**2 + (h - h_third) ** 2 + sampling**2))

    logger.info(f"Volume entropy {h:.4f} ± {fit_stderr:.4f} over r in [{grid[upper][0]:.2f}, {r_max:.2f}]")
    return EntropyEstimate(
        value=h,
        method="volume_growth",
        fit_stderr=fit_stderr,
        grid=grid.tolist(),
        counts=volumes.tolist(),
        window=[float(grid[upper][0]), float(r_max)],
        polynomial_order=order,
        relative_error=worst,
    )
