from typing import Optional

import numpy as np

from hilbert_lab.geometry.domain.polytope import Polytope
from hilbert_lab.geometry.projective import AffineChart, Hyperplane
from hilbert_lab.utils.errors import InvalidSpecError


class HullDomain(Polytope):
    """Convex hull of a finite point cloud approximating a strictly convex body.

    The cloud is typically a sample of a limit set, so the hull is only
    approximately strict. ``angular_resolution`` records the largest angle,
    seen from the center, spanned by one facet; at a vertex the supporting
    hyperplane is taken with the mean of the adjacent facet normals.
    """

    kind = "hull"
    strictly_convex = True

    def __init__(self, points: np.ndarray, chart: Optional[AffineChart] = None) -> None:
        """Initialize the hull.

        Parameters
        ----------
        points : np.ndarray
            The point cloud, of shape (k, n), with k ≥ n + 2.
        chart : Optional[AffineChart]
            The chart, from ambient projective coordinates, in which the
            cloud is given.

        """
        points = np.asarray(points, dtype=float)
        if points.ndim != 2 or len(points) < points.shape[1] + 2:
            msg = "A hull needs at least n + 2 points"
            raise InvalidSpecError(msg)
        super().__init__(points, check_position=False)
        if chart is not None:
            self.chart = chart
        self.angular_resolution = self._angular_resolution()

    def corner_points(self) -> Optional[np.ndarray]:
        # Hull vertices sample a smooth boundary.
        return None

    def _angular_resolution(self) -> float:
        worst = 0.0
        for simplex in self.hull.simplices:
            rays = self.hull.points[simplex] - self.center
            rays /= np.linalg.norm(rays, axis=1, keepdims=True)
            cosines = np.clip(rays @ rays.T, -1.0, 1.0)
            worst = max(worst, float(np.arccos(cosines.min())))
        return worst

    def boundary_tangent(self, p: np.ndarray) -> Hyperplane:
        p = np.asarray(p, dtype=float)
        self._check_on_boundary(p)
        active = self._active_facets(p)
        return Hyperplane.through(self.normals[active].mean(axis=0), p)
