from typing import Optional

import numpy as np

from hilbert_lab import const
from hilbert_lab.geometry.domain.base import ConvexDomain
from hilbert_lab.geometry.projective import Homography, Hyperplane
from hilbert_lab.utils.errors import InvalidSpecError

# Boundary samples used to check that the image stays bounded in the chart.
BOUNDEDNESS_SAMPLES = 512


class TransformedDomain(ConvexDomain):
    """Projective image ``g(Ω)`` of a domain, seen in the standard chart.

    Membership is projective: a chart point ``y`` is inside when the
    dehomogenized preimage ``g⁻¹[y : 1]`` is inside the base domain. Chord
    queries are pulled back to the base domain, so closed-form oracles of
    the base are reused; lines map to lines.
    """

    kind = "transformed"

    def __init__(self, base: ConvexDomain, homography: Homography) -> None:
        """Initialize the image domain.

        Parameters
        ----------
        base : ConvexDomain
            The domain to transport.
        homography : Homography
            The transformation g.

        Raises
        ------
        InvalidSpecError
            If g sends part of the base domain to infinity.

        """
        if homography.dimension != base.dimension:
            msg = "Homography and domain dimensions differ"
            raise InvalidSpecError(msg)

        self.base = base
        self.homography = homography
        self.inverse = homography.inverse()
        self.strictly_convex = base.strictly_convex

        rng = np.random.default_rng(0)
        dirs = rng.normal(size=(BOUNDEDNESS_SAMPLES, base.dimension))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        rim = base.center + base.ray_exit(base.center, dirs)[:, None] * dirs
        pairing = np.append(rim, np.ones((len(rim), 1)), axis=1) @ homography.matrix[-1]
        center_pairing = homography.matrix[-1] @ np.append(base.center, 1.0)
        if np.any(pairing * center_pairing <= 0):
            msg = "Transformed domain is not bounded in the chart"
            raise InvalidSpecError(msg)

        super().__init__(base.dimension, homography.apply_affine(base.center)[0])

    @property
    def supports_flow(self) -> bool:
        return self.base.supports_flow

    def pull_back(self, points: np.ndarray) -> np.ndarray:
        """Base-chart coordinates of chart points (sign-agnostic dehomogenization)."""
        lifted = np.append(points, np.ones((len(points), 1)), axis=1) @ self.inverse.matrix.T
        last = lifted[:, -1]
        safe = np.where(np.abs(last) < const.ZERO_VECTOR_TOL, np.nan, last)
        return lifted[:, :-1] / safe[:, None]

    def _implicit(self, points: np.ndarray) -> np.ndarray:
        values = self.base.implicit(self.pull_back(points))
        # Preimages at infinity are outside.
        return np.where(np.isnan(values), 1.0, values)

    @property
    def exact_offsets(self) -> bool:
        return self.base.exact_offsets

    def implicit_near(self, p: np.ndarray, offsets: np.ndarray) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        offsets = np.atleast_2d(offsets)
        G = self.inverse.matrix
        A, c, l, d = G[:-1, :-1], G[:-1, -1], G[-1, :-1], G[-1, -1]
        denom = l @ p + d
        q = (A @ p + c) / denom
        # Pull-back increment (A δ - q (l·δ)) / (l·(p + δ) + d).
        moved = offsets @ l
        increments = (offsets @ A.T - np.outer(moved, q)) / (denom + moved)[:, None]
        values = self.base.implicit_near(q, increments)
        return np.where(np.isnan(values), 1.0, values)

    def corner_points(self) -> Optional[np.ndarray]:
        corners = self.base.corner_points()
        return None if corners is None else self.homography.apply_affine(corners)

    def _ray_exit(self, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        P = np.append(x, np.ones((len(x), 1)), axis=1) @ self.inverse.matrix.T
        V = np.append(v, np.zeros((len(v), 1)), axis=1) @ self.inverse.matrix.T
        origin = P[:, :-1] / P[:, -1:]
        velocity = (V[:, :-1] * P[:, -1:] - P[:, :-1] * V[:, -1:]) / P[:, -1:] ** 2
        velocity /= np.linalg.norm(velocity, axis=1, keepdims=True)
        s = self.base.ray_exit(origin, velocity)
        hits = self.homography.apply_affine(origin + s[:, None] * velocity)
        return np.einsum("ki,ki->k", hits - x, v) / np.einsum("ki,ki->k", v, v)

    def boundary_tangent(self, p: np.ndarray) -> Hyperplane:
        p = np.asarray(p, dtype=float)
        self._check_on_boundary(p)
        q = self.pull_back(p[None, :])[0]
        covector = self.base.boundary_tangent(q).covector @ self.inverse.matrix
        plane = Hyperplane.from_covector(covector)
        if plane.signed_distance(self.center)[0] > 0:
            plane = Hyperplane(-plane.normal, -plane.offset)
        return plane
