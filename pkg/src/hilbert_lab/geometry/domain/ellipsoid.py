from typing import Optional

import numpy as np

from hilbert_lab.geometry.domain.base import ConvexDomain
from hilbert_lab.utils.errors import InvalidSpecError


class Ellipsoid(ConvexDomain):
    """The ellipsoid ``{x : (x - c)ᵀ Q (x - c) < 1}``.

    With the default ``Q = I`` and ``c = 0`` this is the Klein model of
    hyperbolic space.
    """

    kind = "ellipsoid"
    exact_offsets = True

    def __init__(
        self,
        dimension: int,
        matrix: Optional[np.ndarray] = None,
        center: Optional[np.ndarray] = None,
    ) -> None:
        """Initialize the ellipsoid.

        Parameters
        ----------
        dimension : int
            The dimension n.
        matrix : Optional[np.ndarray]
            Symmetric positive definite form Q, identity by default.
        center : Optional[np.ndarray]
            The center c, origin by default.

        """
        matrix = np.eye(dimension) if matrix is None else np.asarray(matrix, dtype=float)
        center = np.zeros(dimension) if center is None else np.asarray(center, dtype=float)
        if matrix.shape != (dimension, dimension) or center.shape != (dimension,):
            msg = "Ellipsoid matrix and center do not match the dimension"
            raise InvalidSpecError(msg, {"dimension": dimension})
        if not np.allclose(matrix, matrix.T) or np.linalg.eigvalsh(matrix).min() <= 0:
            msg = "Ellipsoid matrix must be symmetric positive definite"
            raise InvalidSpecError(msg)
        super().__init__(dimension, center)
        self.matrix = matrix

    def _implicit(self, points: np.ndarray) -> np.ndarray:
        y = points - self.center
        return np.sqrt(np.einsum("ki,ij,kj->k", y, self.matrix, y)) - 1.0

    def implicit_near(self, p: np.ndarray, offsets: np.ndarray) -> np.ndarray:
        # q(p + δ) - q(p) for the quadratic form q; same sign as the implicit
        # function when q(p) = 1.
        y = np.asarray(p, dtype=float) - self.center
        offsets = np.atleast_2d(offsets)
        return 2.0 * offsets @ (self.matrix @ y) + np.einsum("ki,ij,kj->k", offsets, self.matrix, offsets)

    def _gradient(self, points: np.ndarray) -> np.ndarray:
        return (points - self.center) @ self.matrix

    def _ray_exit(self, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        y = x - self.center
        q = np.einsum("ki,ij,kj->k", v, self.matrix, v)
        h = np.einsum("ki,ij,kj->k", y, self.matrix, v)
        c = np.einsum("ki,ij,kj->k", y, self.matrix, y) - 1.0
        root = np.sqrt(np.maximum(h * h - q * c, 0.0))
        # Root of q t² + 2 h t + c with t > 0, written to avoid cancellation.
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(h <= 0, (root - h) / q, -c / (h + root))
        return t
