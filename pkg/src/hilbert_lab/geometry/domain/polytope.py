from typing import Optional

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from hilbert_lab import const
from hilbert_lab.geometry.domain.base import ConvexDomain
from hilbert_lab.geometry.projective import Hyperplane
from hilbert_lab.utils.errors import InvalidSpecError, NonSmoothPointError


def _hull(points: np.ndarray) -> ConvexHull:
    try:
        return ConvexHull(points)
    except (QhullError, ValueError) as e:
        msg = "Points do not span a full-dimensional convex body"
        raise InvalidSpecError(msg, {"reason": str(e).splitlines()[0]}) from e


class Polytope(ConvexDomain):
    """Convex polytope given by its vertices, stored as ``{A x ≤ b}``.

    Facet normals (rows of A) are unit vectors, so the boundary function
    ``max(A x - b)`` is a lower bound on the euclidean distance to the
    boundary.
    """

    kind = "polytope"
    strictly_convex = False

    def __init__(self, vertices: np.ndarray, check_position: bool = True) -> None:
        """Initialize the polytope.

        Parameters
        ----------
        vertices : np.ndarray
            The vertices, of shape (k, n).
        check_position : bool
            Whether to require every given point to be a vertex.

        """
        vertices = np.asarray(vertices, dtype=float)
        if vertices.ndim != 2 or len(vertices) < vertices.shape[1] + 1:
            msg = "A polytope needs at least n + 1 vertices"
            raise InvalidSpecError(msg)

        hull = _hull(vertices)
        unique = np.unique(vertices, axis=0)
        if check_position and len(hull.vertices) != len(unique):
            msg = "Polytope vertices are not in convex position"
            raise InvalidSpecError(msg, {"interior_points": len(unique) - len(hull.vertices)})

        # Triangulated faces of higher-dimensional hulls repeat their equation.
        equations = np.unique(np.round(hull.equations, 12), axis=0)
        self.normals = equations[:, :-1]
        self.offsets = -equations[:, -1]
        self.vertices = vertices[hull.vertices]
        self.hull = hull

        super().__init__(vertices.shape[1], self.vertices.mean(axis=0))

    def _implicit(self, points: np.ndarray) -> np.ndarray:
        return np.max(points @ self.normals.T - self.offsets, axis=1)

    def _ray_exit(self, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        slack = self.offsets - x @ self.normals.T
        speed = v @ self.normals.T
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(speed > 0, slack / speed, np.inf)
        return t.min(axis=1)

    def corner_points(self) -> Optional[np.ndarray]:
        return self.vertices if self.dimension == 2 else None

    def _active_facets(self, p: np.ndarray) -> np.ndarray:
        return np.flatnonzero(np.abs(p @ self.normals.T - self.offsets) < const.BOUNDARY_TOL)

    def boundary_tangent(self, p: np.ndarray) -> Hyperplane:
        p = np.asarray(p, dtype=float)
        self._check_on_boundary(p)
        active = self._active_facets(p)
        if len(active) != 1:
            msg = "No unique supporting hyperplane at a polytope vertex or edge"
            raise NonSmoothPointError(msg, {"p": p.tolist(), "facets": len(active)})
        return Hyperplane(self.normals[active[0]].copy(), float(self.offsets[active[0]]))
