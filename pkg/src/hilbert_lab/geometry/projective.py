"""Homogeneous coordinates, homographies, cross-ratios and affine charts."""

from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence, Union

import numpy as np
from scipy.linalg import null_space

from hilbert_lab import const
from hilbert_lab.utils.errors import (
    ChartFailureError,
    DegenerateConfigurationError,
    InvalidParameterError,
    LabError,
    NotCollinearError,
    TangentUnavailableError,
    ZeroImageError,
)
from hilbert_lab.utils.logging import get_logger

if TYPE_CHECKING:
    from hilbert_lab.geometry.domain.base import ConvexDomain

logger = get_logger("geometry.projective")

PointLike = Union["ProjectivePoint", np.ndarray, list, tuple]


####################################################################################################
# POINTS
####################################################################################################


def _normalize(coords: np.ndarray) -> np.ndarray:
    """Scale to unit length with the first nonzero coordinate positive."""
    norm = np.linalg.norm(coords)
    if norm < const.ZERO_VECTOR_TOL:
        msg = "Homogeneous coordinates must not be the zero vector"
        raise InvalidParameterError(msg)
    coords = coords / norm
    first = np.flatnonzero(np.abs(coords) > const.COLLINEAR_TOL)[0]
    if coords[first] < 0:
        coords = -coords
    return coords


@dataclass(frozen=True, eq=False)
class ProjectivePoint:
    """A point of real projective space given by homogeneous coordinates.

    Coordinates are stored normalized, so two points are equal exactly when
    their normalized vectors agree to tolerance.
    """

    coords: np.ndarray

    def __post_init__(self) -> None:
        coords = _normalize(np.asarray(self.coords, dtype=float).ravel())
        coords.setflags(write=False)
        object.__setattr__(self, "coords", coords)

    @classmethod
    def from_affine(cls, x: np.ndarray) -> "ProjectivePoint":
        """Lift an affine point ``x`` to ``[x : 1]``."""
        return cls(np.append(np.asarray(x, dtype=float), 1.0))

    @property
    def dimension(self) -> int:
        return len(self.coords) - 1

    def affine(self) -> np.ndarray:
        """Dehomogenize in the standard chart.

        Raises
        ------
        ChartFailureError
            If the point lies on the hyperplane at infinity.

        """
        if abs(self.coords[-1]) < const.ZERO_VECTOR_TOL:
            msg = "Point lies on the hyperplane at infinity"
            raise ChartFailureError(msg, {"coords": self.coords.tolist()})
        return self.coords[:-1] / self.coords[-1]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ProjectivePoint):
            return NotImplemented
        if len(self.coords) != len(other.coords):
            return False
        return bool(np.allclose(self.coords, other.coords, rtol=0.0, atol=const.BOUNDARY_TOL))

    __hash__ = None  # type: ignore[assignment]


def as_point(p: PointLike) -> ProjectivePoint:
    """Accept a ProjectivePoint or an affine coordinate vector."""
    if isinstance(p, ProjectivePoint):
        return p
    return ProjectivePoint.from_affine(np.asarray(p, dtype=float))


def as_affine(p: PointLike) -> np.ndarray:
    """Accept a ProjectivePoint or an affine coordinate vector."""
    if isinstance(p, ProjectivePoint):
        return p.affine()
    return np.asarray(p, dtype=float)


####################################################################################################
# HOMOGRAPHIES
####################################################################################################


@dataclass(frozen=True, eq=False)
class Homography:
    """An element of PGL(n+1) stored with determinant of modulus one."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        matrix = np.array(self.matrix, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            msg = f"Homography matrix must be square, got shape {matrix.shape}"
            raise InvalidParameterError(msg)

        det = np.linalg.det(matrix)
        if not np.isfinite(det) or abs(det) < const.ZERO_VECTOR_TOL:
            msg = "Homography matrix is singular"
            raise DegenerateConfigurationError(msg, {"det": float(det)})
        matrix = matrix / abs(det) ** (1.0 / matrix.shape[0])

        cond = np.linalg.cond(matrix)
        if cond > const.CONDITION_WARN:
            logger.warning(f"Ill-conditioned homography (condition number {cond:.3e})")

        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    @classmethod
    def identity(cls, n: int) -> "Homography":
        """Identity of projective n-space."""
        return cls(np.eye(n + 1))

    @classmethod
    def from_matrix(cls, rows: Union[np.ndarray, Sequence[Sequence[float]]]) -> "Homography":
        """Homography from nested rows, as read from a config document."""
        return cls(np.asarray(rows, dtype=float))

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0] - 1

    def compose(self, other: "Homography") -> "Homography":
        """Return ``self ∘ other``."""
        return Homography(self.matrix @ other.matrix)

    def __matmul__(self, other: "Homography") -> "Homography":
        return self.compose(other)

    def inverse(self) -> "Homography":
        return Homography(np.linalg.inv(self.matrix))

    def apply(self, p: PointLike) -> ProjectivePoint:
        return apply_homography(self, as_point(p))

    def apply_affine(self, points: np.ndarray) -> np.ndarray:
        """Apply to affine points of shape ``(k, n)`` and dehomogenize.

        Raises
        ------
        ChartFailureError
            If an image lands on the hyperplane at infinity.

        """
        points = np.atleast_2d(np.asarray(points, dtype=float))
        lifted = np.hstack([points, np.ones((len(points), 1))]) @ self.matrix.T
        last = lifted[:, -1]
        if np.any(np.abs(last) < const.ZERO_VECTOR_TOL):
            msg = "Image point lies on the hyperplane at infinity"
            raise ChartFailureError(msg)
        return lifted[:, :-1] / last[:, None]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Homography):
            return NotImplemented
        a, b = self.matrix, other.matrix
        return bool(np.allclose(a, b, atol=const.BOUNDARY_TOL) or np.allclose(a, -b, atol=const.BOUNDARY_TOL))

    __hash__ = None  # type: ignore[assignment]


def apply_homography(g: Homography, p: ProjectivePoint) -> ProjectivePoint:
    """Return the class of ``g.matrix @ p.coords``.

    Raises
    ------
    ZeroImageError
        If the image vector numerically vanishes.

    """
    image = g.matrix @ p.coords
    if np.linalg.norm(image) < const.ZERO_VECTOR_TOL * np.linalg.norm(g.matrix):
        msg = "Homography sent a point to the zero vector"
        raise ZeroImageError(msg, {"point": p.coords.tolist()})
    return ProjectivePoint(image)


####################################################################################################
# CROSS-RATIO
####################################################################################################


def cross_ratio(a: PointLike, b: PointLike, x: PointLike, y: PointLike) -> float:
    """Cross-ratio ``[a, b, x, y] = (ax / bx) / (ay / by)`` of four collinear points.

    The four lifts are written in the basis given by the lifts of ``a`` and
    ``b`` of their common line; with these coordinates ``(α, β)`` the
    cross-ratio is ``(x_β y_α) / (x_α y_β)``, which does not depend on the
    scale of any lift and is invariant under homographies.

    Parameters
    ----------
    a, b, x, y : ProjectivePoint or array
        The four points; arrays are read as affine coordinates.

    Returns
    -------
    float
        The signed cross-ratio.

    Raises
    ------
    NotCollinearError
        If the lifted vectors span more than a plane.
    DegenerateConfigurationError
        If ``a == b`` or ``x`` or ``y`` coincides with ``a`` or ``b``.

    """
    pa, pb, px, py = (as_point(p) for p in (a, b, x, y))
    lifts = np.column_stack([pa.coords, pb.coords, px.coords, py.coords])

    singular = np.linalg.svd(lifts, compute_uv=False)
    if len(singular) > 2 and singular[2] > const.COLLINEAR_TOL * singular[0]:
        msg = "Cross-ratio arguments are not collinear"
        raise NotCollinearError(msg, {"singular_value": float(singular[2])})

    basis = lifts[:, :2]
    if np.linalg.svd(basis, compute_uv=False)[1] < const.COLLINEAR_TOL:
        msg = "Cross-ratio reference points coincide"
        raise DegenerateConfigurationError(msg)

    (x_a, y_a), (x_b, y_b) = np.linalg.lstsq(basis, lifts[:, 2:], rcond=None)[0]
    if min(abs(x_a), abs(x_b), abs(y_a), abs(y_b)) < const.COLLINEAR_TOL:
        msg = "Cross-ratio argument coincides with a reference point"
        raise DegenerateConfigurationError(msg)

    return float((x_b * y_a) / (x_a * y_b))


####################################################################################################
# HYPERPLANES AND CHARTS
####################################################################################################


@dataclass(frozen=True)
class Hyperplane:
    """Affine hyperplane ``{z : normal · z = offset}`` with a unit normal.

    For supporting hyperplanes of a domain the normal points outward.
    """

    normal: np.ndarray
    offset: float

    @classmethod
    def through(cls, normal: np.ndarray, point: np.ndarray) -> "Hyperplane":
        normal = np.asarray(normal, dtype=float)
        normal = normal / np.linalg.norm(normal)
        return cls(normal, float(normal @ np.asarray(point, dtype=float)))

    @classmethod
    def from_covector(cls, covector: np.ndarray) -> "Hyperplane":
        """Read the covector ``(c, c0)``, i.e. ``c · z + c0 = 0``.

        Raises
        ------
        ChartFailureError
            If the covector is the hyperplane at infinity.

        """
        covector = np.asarray(covector, dtype=float)
        scale = np.linalg.norm(covector[:-1])
        if scale < const.ZERO_VECTOR_TOL * max(1.0, abs(covector[-1])):
            msg = "Hyperplane is the hyperplane at infinity of the chart"
            raise ChartFailureError(msg)
        return cls(covector[:-1] / scale, float(-covector[-1] / scale))

    @property
    def covector(self) -> np.ndarray:
        return np.append(self.normal, -self.offset)

    def signed_distance(self, points: np.ndarray) -> np.ndarray:
        return np.atleast_2d(points) @ self.normal - self.offset


@dataclass(frozen=True)
class AffineChart:
    """An affine chart of projective space.

    The chart is the homography ``H`` taking reference homogeneous
    coordinates to chart homogeneous coordinates; chart coordinates of a
    reference point ``X`` are ``(HX)[:n] / (HX)[n]``. The last row of ``H``
    is the hyperplane at infinity.
    """

    homography: Homography

    @classmethod
    def identity(cls, n: int) -> "AffineChart":
        return cls(Homography.identity(n))

    @property
    def dimension(self) -> int:
        return self.homography.dimension

    @property
    def hyperplane_at_infinity(self) -> np.ndarray:
        return self.homography.matrix[-1].copy()

    @property
    def frame(self) -> np.ndarray:
        """Reference lifts of the chart's coordinate directions, one per row."""
        return np.linalg.inv(self.homography.matrix)[:, :-1].T

    @property
    def is_identity(self) -> bool:
        return self.homography == Homography.identity(self.dimension)

    def to_chart(self, points: np.ndarray) -> np.ndarray:
        """Chart coordinates of reference affine points.

        Raises
        ------
        ChartFailureError
            If a point pairs to zero against the hyperplane at infinity.

        """
        single = np.ndim(points) == 1
        out = self.homography.apply_affine(points)
        return out[0] if single else out

    def lift(self, points: np.ndarray) -> np.ndarray:
        """Reference affine coordinates of chart points."""
        single = np.ndim(points) == 1
        out = self.homography.inverse().apply_affine(points)
        return out[0] if single else out

    def pushforward(self, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Derivative of the chart map at reference point ``x`` applied to ``v``.

        With ``H = [[A, c], [l, d]]`` the map is ``f(x) = (Ax + c) / (l·x + d)``
        and ``Df(x) v = (A v - f(x) (l·v)) / (l·x + d)``.
        """
        H = self.homography.matrix
        x = np.asarray(x, dtype=float)
        v = np.asarray(v, dtype=float)
        denom = H[-1, :-1] @ x + H[-1, -1]
        fx = self.to_chart(x)
        return (H[:-1, :-1] @ v - fx * (H[-1, :-1] @ v)) / denom

    def transform_covector(self, covector: np.ndarray) -> np.ndarray:
        """Express a reference covector in chart homogeneous coordinates."""
        return np.asarray(covector, dtype=float) @ np.linalg.inv(self.homography.matrix)

    def hyperplane_to_chart(self, plane: Hyperplane) -> Hyperplane:
        return Hyperplane.from_covector(self.transform_covector(plane.covector))

    def compose(self, inner: "AffineChart") -> "AffineChart":
        """Chart obtained by applying ``inner`` first and then this chart."""
        return AffineChart(self.homography @ inner.homography)


def adapted_chart(
    domain: "ConvexDomain",
    xplus: PointLike,
    xminus: PointLike,
    normalize: bool = False,
) -> AffineChart:
    """Build an affine chart adapted to the chord from ``xplus`` to ``xminus``.

    In the returned chart the tangent hyperplanes at both endpoints are
    parallel to each other and orthogonal to the chord, and their
    intersection lies at infinity. With ``normalize`` the chord is sent to
    the segment ``[0, 1]`` of the first axis, ``xplus`` to 0 and ``xminus``
    to 1. Otherwise the chord keeps its position and length; a chord that is
    already adapted in the reference chart gets the identity chart.

    Parameters
    ----------
    domain : ConvexDomain
        The domain, with a tangent oracle at both endpoints.
    xplus, xminus : ProjectivePoint or array
        The two distinct boundary endpoints of the chord.
    normalize : bool
        Whether to return the normalized chart.

    Returns
    -------
    AffineChart
        The adapted chart.

    Raises
    ------
    TangentUnavailableError
        If the tangent oracle fails at either endpoint.
    ChartFailureError
        If the endpoints coincide or a tangent contains the chord.

    """
    xp = as_affine(xplus)
    xm = as_affine(xminus)
    n = len(xp)

    try:
        n_plus = domain.boundary_tangent(xp).normal
        n_minus = domain.boundary_tangent(xm).normal
    except LabError as e:
        msg = "Boundary tangent unavailable at a chord endpoint"
        raise TangentUnavailableError(msg, {"reason": str(e)}) from e

    d = xp - xm
    length = np.linalg.norm(d)
    if length < const.BOUNDARY_TOL:
        msg = "Chord endpoints coincide"
        raise ChartFailureError(msg)

    p_plus = n_plus @ d
    p_minus = -(n_minus @ d)
    if p_plus < const.BOUNDARY_TOL * length or p_minus < const.BOUNDARY_TOL * length:
        msg = "A tangent hyperplane contains the chord"
        raise ChartFailureError(msg, {"p_plus": float(p_plus), "p_minus": float(p_minus)})

    direction = d / length
    already = (
        np.linalg.norm(n_plus + n_minus) < const.BOUNDARY_TOL
        and np.linalg.norm(n_plus - direction) < const.BOUNDARY_TOL
    )
    if already and not normalize:
        return AffineChart.identity(n)

    # Covectors vanishing on each tangent hyperplane, nonnegative on the domain.
    tau_plus = np.append(-n_plus, n_plus @ xp)
    tau_minus = np.append(-n_minus, n_minus @ xm)
    at_infinity = p_minus * tau_plus + p_plus * tau_minus

    lifts = np.vstack([np.append(xp, 1.0), np.append(xm, 1.0)])
    transverse = null_space(lifts).T
    H = np.vstack([p_minus * tau_plus, transverse, at_infinity])

    if not normalize:
        # Put the chord back in place: u ↦ xp + u (xm - xp), transverse axes scaled by |d|.
        placement = np.eye(n + 1)
        placement[:n, 0] = xm - xp
        if n > 1:
            placement[:n, 1:n] = length * null_space(direction[None, :])
        placement[:n, n] = xp
        H = placement @ H

    chart = AffineChart(Homography(H))
    logger.debug(f"Adapted chart built (normalize={normalize}, p+={p_plus:.3e}, p-={p_minus:.3e})")
    return chart
