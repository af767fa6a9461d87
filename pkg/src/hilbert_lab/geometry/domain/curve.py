from typing import Optional

import numpy as np
from scipy.interpolate import CubicSpline

from hilbert_lab.geometry.domain.base import ConvexDomain
from hilbert_lab.utils.errors import InvalidSpecError

# Grid on which convexity of the interpolated curve is certified.
CONVEXITY_GRID = 4096


class BoundaryCurve(ConvexDomain):
    """Planar body bounded by a sampled radial curve ``r(θ)`` around a center.

    The radii are given at equally spaced angles ``θ_k = 2πk/K`` and
    interpolated by a periodic cubic spline. The body is accepted when the
    interpolated curve has positive signed curvature everywhere, which for a
    polar curve reads ``r² + 2r'² - r r'' > 0``.
    """

    kind = "boundary_curve"

    def __init__(self, radii: np.ndarray, center: Optional[np.ndarray] = None) -> None:
        """Initialize the body.

        Parameters
        ----------
        radii : np.ndarray
            Positive radii at K ≥ 8 equally spaced angles.
        center : Optional[np.ndarray]
            The interior point the radii are measured from, origin by default.

        """
        radii = np.asarray(radii, dtype=float)
        if radii.ndim != 1 or len(radii) < 8 or np.any(radii <= 0):
            msg = "boundary_curve needs at least 8 positive radii"
            raise InvalidSpecError(msg)

        center = np.zeros(2) if center is None else np.asarray(center, dtype=float)
        super().__init__(2, center)

        angles = np.linspace(0.0, 2 * np.pi, len(radii) + 1)
        self.radius = CubicSpline(angles, np.append(radii, radii[0]), bc_type="periodic")

        theta = np.linspace(0.0, 2 * np.pi, CONVEXITY_GRID, endpoint=False)
        r, dr, ddr = self.radius(theta), self.radius(theta, 1), self.radius(theta, 2)
        curvature = r * r + 2 * dr * dr - r * ddr
        if np.any(r <= 0) or curvature.min() < 0:
            msg = "Interpolated boundary curve is not convex"
            raise InvalidSpecError(msg, {"min_curvature": float(curvature.min())})
        self.strictly_convex = bool(curvature.min() > 0)

    def _implicit(self, points: np.ndarray) -> np.ndarray:
        y = points - self.center
        rho = np.hypot(y[:, 0], y[:, 1])
        theta = np.mod(np.arctan2(y[:, 1], y[:, 0]), 2 * np.pi)
        return rho / self.radius(theta) - 1.0

    def _gradient(self, points: np.ndarray) -> np.ndarray:
        y = points - self.center
        theta = np.mod(np.arctan2(y[:, 1], y[:, 0]), 2 * np.pi)
        r, dr = self.radius(theta), self.radius(theta, 1)
        # Outward normal of the polar curve: r e_ρ - r' e_θ.
        e_rho = np.column_stack([np.cos(theta), np.sin(theta)])
        e_theta = np.column_stack([-np.sin(theta), np.cos(theta)])
        return (1.0 / (r * r))[:, None] * (r[:, None] * e_rho - dr[:, None] * e_theta)
