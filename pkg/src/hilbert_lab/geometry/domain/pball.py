from typing import Optional

import numpy as np

from hilbert_lab.geometry.domain.base import ConvexDomain
from hilbert_lab.utils.errors import InvalidSpecError


class PBall(ConvexDomain):
    """Unit ball of the p-norm, ``{x : Σ |x_i - c_i|^p < 1}`` with p > 1.

    Strictly convex for every p > 1; for p > 2 the boundary flattens at the
    axis points, which is what makes it a useful non-ellipsoid benchmark.
    """

    kind = "p_ball"
    exact_offsets = True

    def __init__(self, dimension: int, p: float, center: Optional[np.ndarray] = None) -> None:
        if not p > 1 or not np.isfinite(p):
            msg = f"p_ball needs a finite exponent p > 1, got {p}"
            raise InvalidSpecError(msg)
        center = np.zeros(dimension) if center is None else np.asarray(center, dtype=float)
        super().__init__(dimension, center)
        self.p = float(p)

    def _implicit(self, points: np.ndarray) -> np.ndarray:
        return np.linalg.norm(points - self.center, ord=self.p, axis=1) - 1.0

    def implicit_near(self, p: np.ndarray, offsets: np.ndarray) -> np.ndarray:
        """Increment ``Σ |y_i + δ_i|^p - |y_i|^p`` over ``y = p - c``.

        Coordinates with ``δ_i / y_i > -1`` use ``|y_i|^p expm1(p log1p(δ_i / y_i))``.
        """
        y = np.asarray(p, dtype=float) - self.center
        offsets = np.atleast_2d(offsets)
        base = np.abs(y) ** self.p
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = offsets / y
            smooth = (y != 0) & (ratio > -1)
            relative = base * np.expm1(self.p * np.log1p(np.where(smooth, ratio, 0.0)))
            increments = np.where(smooth, relative, np.abs(y + offsets) ** self.p - base)
        return increments.sum(axis=1)

    def _gradient(self, points: np.ndarray) -> np.ndarray:
        y = points - self.center
        return np.sign(y) * np.abs(y) ** (self.p - 1)
