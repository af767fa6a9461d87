from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Optional

import numpy as np

from hilbert_lab import const
from hilbert_lab.geometry.projective import AffineChart, Hyperplane
from hilbert_lab.utils.errors import (
    InvalidParameterError,
    NoConvergenceError,
    NotInteriorError,
    NotOnBoundaryError,
)


@dataclass(frozen=True)
class ChordEndpoints:
    """Boundary hits of the line through an interior point.

    ``xplus = x + a v`` and ``xminus = x - b v`` for the unit direction ``v``.
    """

    xplus: np.ndarray
    xminus: np.ndarray
    a: float
    b: float

    @property
    def length(self) -> float:
        return self.a + self.b

    def reversed(self) -> "ChordEndpoints":
        return ChordEndpoints(self.xminus, self.xplus, self.b, self.a)


class ConvexDomain(ABC):
    """Abstract base class for properly convex domains.

    A domain is given in its reference affine chart, where it is bounded,
    through a signed implicit function (negative inside) and a ray-exit
    oracle. Subclasses provide the implicit function and may override the
    gradient and the ray oracle with closed forms.
    """

    kind: str = ""
    strictly_convex: bool = True
    # implicit_near keeps its sign for offsets far below the domain scale.
    exact_offsets: bool = False

    def __init__(self, dimension: int, center: np.ndarray, chart: Optional[AffineChart] = None) -> None:
        """Initialize the domain.

        Parameters
        ----------
        dimension : int
            The dimension n of the ambient projective space.
        center : np.ndarray
            A stored interior base point.
        chart : Optional[AffineChart]
            The reference chart, identity by default.

        """
        self.dimension = dimension
        self.center = np.asarray(center, dtype=float)
        self.chart = chart if chart is not None else AffineChart.identity(dimension)

    @property
    def supports_flow(self) -> bool:
        return self.kind in const.flow_kinds

    @abstractmethod
    def _implicit(self, points: np.ndarray) -> np.ndarray:
        """Evaluate the boundary function on a batch of points.

        Parameters
        ----------
        points : np.ndarray
            The points, of shape (k, n).

        Returns
        -------
        np.ndarray
            Values of shape (k,), negative inside, zero on the boundary.

        """
        raise NotImplementedError

    def _gradient(self, points: np.ndarray) -> np.ndarray:
        """Gradient of the boundary function by central differences."""
        h = const.FINITE_DIFFERENCE_STEP * max(1.0, float(np.max(np.abs(self.center))))
        grads = np.empty_like(points)
        for i in range(self.dimension):
            step = np.zeros(self.dimension)
            step[i] = h
            grads[:, i] = (self._implicit(points + step) - self._implicit(points - step)) / (2 * h)
        return grads

    def _ray_exit(self, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Exit parameters of rays ``x + t v`` by bracketing and bisection."""
        lo = np.zeros(len(x))
        hi = np.ones(len(x))
        for _ in range(const.BRACKET_DOUBLINGS):
            inside = self._implicit(x + hi[:, None] * v) < 0
            if not np.any(inside):
                break
            lo = np.where(inside, hi, lo)
            hi = np.where(inside, 2 * hi, hi)
        else:
            msg = f"Ray bracketing exceeded {const.BRACKET_DOUBLINGS} doublings"
            raise NoConvergenceError(msg, {"kind": self.kind})

        for _ in range(const.BISECTION_ITERATIONS):
            mid = 0.5 * (lo + hi)
            inside = self._implicit(x + mid[:, None] * v) < 0
            lo = np.where(inside, mid, lo)
            hi = np.where(inside, hi, mid)
        return 0.5 * (lo + hi)

    def implicit(self, points: np.ndarray) -> np.ndarray:
        """Signed boundary function at one point or a batch of points."""
        points = np.asarray(points, dtype=float)
        values = self._implicit(np.atleast_2d(points))
        return values[0] if points.ndim == 1 else values

    def implicit_near(self, p: np.ndarray, offsets: np.ndarray) -> np.ndarray:
        """Boundary function at ``p + δ`` for a base point ``p`` and a batch of offsets ``δ``.

        Domains with ``exact_offsets`` evaluate the increment over a boundary
        point ``p`` in closed form, so the sign is right for offsets down to
        the underflow range; this fallback adds first.
        """
        return self._implicit(np.asarray(p, dtype=float) + np.atleast_2d(offsets))

    def gradient(self, points: np.ndarray) -> np.ndarray:
        """Gradient of the boundary function on a batch of points."""
        return self._gradient(np.atleast_2d(np.asarray(points, dtype=float)))

    def ray_exit(self, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Parameter ``t > 0`` at which ``x + t v`` leaves the domain.

        ``x`` and ``v`` broadcast against each other; a single ray returns a
        scalar.
        """
        x = np.asarray(x, dtype=float)
        v = np.asarray(v, dtype=float)
        single = x.ndim == 1 and v.ndim == 1
        x2, v2 = np.broadcast_arrays(np.atleast_2d(x), np.atleast_2d(v))
        t = self._ray_exit(np.array(x2), np.array(v2))
        return float(t[0]) if single else t

    def contains(self, x: np.ndarray) -> bool:
        """Whether ``x`` lies inside the domain by more than the interior tolerance."""
        return bool(self.implicit(np.asarray(x, dtype=float)) < -const.INTERIOR_TOL)

    def contains_many(self, points: np.ndarray) -> np.ndarray:
        return self._implicit(np.atleast_2d(points)) < -const.INTERIOR_TOL

    def chord(self, x: np.ndarray, v: np.ndarray) -> ChordEndpoints:
        """Chord endpoints of the line through ``x`` with direction ``v``.

        Parameters
        ----------
        x : np.ndarray
            An interior point.
        v : np.ndarray
            A direction; it is normalized to unit length.

        Returns
        -------
        ChordEndpoints
            The two boundary hits and their euclidean distances to ``x``.

        Raises
        ------
        NotInteriorError
            If ``x`` is not interior.
        NoConvergenceError
            If the ray oracle fails.

        """
        x = np.asarray(x, dtype=float)
        v = unit(v)
        if not self.contains(x):
            msg = "Chord base point is not interior"
            raise NotInteriorError(msg, {"x": x.tolist()})
        a = self.ray_exit(x, v)
        b = self.ray_exit(x, -v)
        return ChordEndpoints(x + a * v, x - b * v, a, b)

    def chord_distances(self, x: np.ndarray, v: np.ndarray) -> tuple:
        """Vectorized ``(a, b)`` for rays through interior points.

        No interior check is done; callers pass points known to be inside.
        """
        return self.ray_exit(x, v), self.ray_exit(x, -np.asarray(v, dtype=float))

    def boundary_tangent(self, p: np.ndarray) -> Hyperplane:
        """Supporting hyperplane at a boundary point, with outward normal.

        Raises
        ------
        NotOnBoundaryError
            If ``p`` is not on the boundary.
        NonSmoothPointError
            If the supporting hyperplane is not unique.

        """
        p = np.asarray(p, dtype=float)
        self._check_on_boundary(p)
        grad = self._gradient(p[None, :])[0]
        return Hyperplane.through(grad, p)

    def _check_on_boundary(self, p: np.ndarray) -> None:
        residual = float(self.implicit(p))
        if abs(residual) > const.BOUNDARY_TOL:
            msg = "Point is not on the boundary"
            raise NotOnBoundaryError(msg, {"p": p.tolist(), "residual": residual})

    def boundary_point(self, direction: np.ndarray) -> np.ndarray:
        """Boundary point hit from the center in the given direction."""
        v = unit(direction)
        return self.center + self.ray_exit(self.center, v) * v

    def corner_points(self) -> Optional[np.ndarray]:
        """Boundary points of a planar domain where the boundary has a corner, if any."""
        return None

    def sample_interior(self, rng: np.random.Generator, k: int, shrink: float = 0.98) -> np.ndarray:
        """Random interior points, star-shaped around the center.

        Parameters
        ----------
        rng : np.random.Generator
            The random generator for reproducibility.
        k : int
            The number of points.
        shrink : float
            Fraction of the radial exit distance that samples may reach.

        Returns
        -------
        np.ndarray
            Interior points of shape (k, n).

        """
        dirs = rng.normal(size=(k, self.dimension))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        exits = self.ray_exit(self.center, dirs)
        radii = shrink * exits * rng.uniform(size=k) ** (1.0 / self.dimension)
        return self.center + radii[:, None] * dirs

    def __repr__(self) -> str:
        return f"{type(self).__name__}(kind={self.kind!r}, dimension={self.dimension})"


def unit(v: np.ndarray) -> np.ndarray:
    """Normalize a vector, rejecting the zero vector."""
    v = np.asarray(v, dtype=float)
    norm = np.linalg.norm(v)
    if norm < const.ZERO_VECTOR_TOL:
        msg = "Direction must be a nonzero vector"
        raise InvalidParameterError(msg)
    return v / norm
