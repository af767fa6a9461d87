"""Invariant domains reconstructed from the fixed points of a group."""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import linprog

from hilbert_lab import const
from hilbert_lab.geometry.domain import ConvexDomain, Ellipsoid, HullDomain
from hilbert_lab.geometry.projective import AffineChart, Homography
from hilbert_lab.group.elements import GroupElement, eigen_data, evaluate_word
from hilbert_lab.group.families import Presentation
from hilbert_lab.group.words import ConjugacyClass, enumerate_conjugacy_classes, reduced_words
from hilbert_lab.utils.errors import (
    InvalidSpecError,
    NearDefectiveError,
    NotProperlyConvexError,
)
from hilbert_lab.utils.logging import get_logger

logger = get_logger("group.hull")

# Margin by which the positive covector must separate the lifted limit points.
POSITIVITY_TOL = 1e-9

# Word length of the elements whose images of the fixed points join the sample.
IMAGE_WORD_LENGTH = 2


@dataclass(frozen=True)
class ConicFit:
    """Least-squares conic ``A x² + B xy + C y² + D x + E y + F = 0``.

    Coefficients refer to the normalized coordinates ``(p - shift) / scale``;
    ``residual`` is the RMS algebraic residual there for unit coefficients.
    """

    coefficients: np.ndarray
    residual: float
    shift: np.ndarray
    scale: float

    def ellipsoid(self) -> Ellipsoid:
        """The fitted conic as an ellipse in the original coordinates.

        Raises
        ------
        InvalidSpecError
            If the conic is not an ellipse.

        """
        A, B, C, D, E, F = self.coefficients
        M = np.array([[A, B / 2], [B / 2, C]])
        g = np.array([D, E])
        try:
            center = -0.5 * np.linalg.solve(M, g)
        except np.linalg.LinAlgError as e:
            msg = "Fitted conic has no center"
            raise InvalidSpecError(msg) from e
        level = F + 0.5 * g @ center
        Q = M / -level
        if np.any(np.linalg.eigvalsh(Q) <= 0):
            msg = "Fitted conic is not an ellipse"
            raise InvalidSpecError(msg, {"coefficients": self.coefficients.tolist()})
        return Ellipsoid(2, Q / self.scale**2, self.shift + self.scale * center)


def _conjugates(classes: Sequence[ConjugacyClass], generators: Sequence[GroupElement]) -> List[GroupElement]:
    """Elements of every cyclic rotation of the class words."""
    words = {c.word[i:] + c.word[:i] for c in classes for i in range(c.word_length)}
    return [evaluate_word(generators, w) for w in sorted(words)]


def _fixed_points(elements: Sequence[GroupElement], base_point: Optional[np.ndarray]) -> Tuple[np.ndarray, np.ndarray]:
    """Attracting and repelling fixed points of the biproximal elements, with orientation signs.

    A zero sign marks a point whose side could not be decided yet.
    """
    vectors: List[np.ndarray] = []
    covectors: List[np.ndarray] = []
    for g in elements:
        try:
            data = eigen_data(g)
        except NearDefectiveError:
            continue
        vectors += [data.top_vector.coords, data.bottom_vector.coords]
        covectors += [data.top_covector, data.bottom_covector]
    if not vectors:
        msg = "No biproximal element among the enumerated classes"
        raise NotProperlyConvexError(msg)

    V = np.array(vectors)
    U = np.array(covectors)
    if base_point is not None:
        # The repelling hyperplane of g supports the domain: orient it by the
        # base point, then put the fixed point on the same side.
        U *= np.sign(U @ base_point)[:, None]
        signs = np.sign(np.einsum("ij,ij->i", U, V))
    else:
        pairing = V @ U[0]
        signs = np.where(np.abs(pairing) < const.COLLINEAR_TOL, 0.0, np.sign(pairing))
    return V, signs


def _positive_covector(lifts: np.ndarray) -> np.ndarray:
    """Covector maximizing the smallest pairing with the lifts, in the unit box."""
    k, size = lifts.shape
    cost = np.zeros(size + 1)
    cost[-1] = -1.0
    A_ub = np.hstack([-lifts, np.ones((k, 1))])
    bounds = [(-1.0, 1.0)] * size + [(None, 1.0)]
    result = linprog(cost, A_ub=A_ub, b_ub=np.zeros(k), bounds=bounds, method="highs")
    if not result.success or result.x[-1] <= POSITIVITY_TOL:
        msg = "Limit points do not lie in a properly convex cone"
        raise NotProperlyConvexError(msg, {"margin": float(result.x[-1]) if result.success else None})
    phi = result.x[:-1]
    return phi / np.linalg.norm(phi)


def _unique_rays(lifts: np.ndarray) -> np.ndarray:
    lifts = lifts / np.linalg.norm(lifts, axis=1, keepdims=True)
    return np.unique(np.round(lifts, 12), axis=0)


def generate_domain_hull(
    generators: Sequence[GroupElement],
    max_len: int,
    presentation: Optional[Presentation] = None,
    base_point: Optional[np.ndarray] = None,
    threads: int = 1,
) -> HullDomain:
    """Convex hull of a sample of the limit set built from the short conjugacy classes.

    The sample holds the attracting and repelling fixed points of every
    cyclic rotation of the class words up to ``max_len``, and their images
    under the elements of word length at most ``IMAGE_WORD_LENGTH``.

    Parameters
    ----------
    generators : Sequence[GroupElement]
        The generators.
    max_len : int
        The maximal word length.
    presentation : Optional[Presentation]
        The presentation, free by default.
    base_point : Optional[np.ndarray]
        Homogeneous lift of a point of the invariant domain, used to orient
        the lifts of the fixed points.
    threads : int
        Worker threads for the enumeration.

    Returns
    -------
    HullDomain
        The hull, in a chart where a covector positive on all lifts is the
        hyperplane at infinity.

    Raises
    ------
    NotProperlyConvexError
        If the lifted fixed points do not lie in a properly convex cone.

    """
    enumeration = enumerate_conjugacy_classes(generators, max_len, presentation, threads)
    fixed, signs = _fixed_points(_conjugates(enumeration.classes, generators), base_point)
    fixed /= np.linalg.norm(fixed, axis=1, keepdims=True)

    settled = signs != 0
    phi = _positive_covector(fixed[settled] * signs[settled, None])
    # Points on the reference hyperplane are oriented by phi.
    signs[~settled] = np.sign(fixed[~settled] @ phi)
    lifts = _unique_rays(fixed * signs[:, None])

    # Each element maps the cone of lifts onto itself or onto its negative.
    images = [lifts]
    for word in reduced_words(len(generators), IMAGE_WORD_LENGTH)[1:]:
        moved = lifts @ evaluate_word(generators, word).matrix.T
        images.append(moved * np.sign(np.sum(moved @ phi)))
    lifts = _unique_rays(np.vstack(images))
    phi = _positive_covector(lifts)

    H = np.vstack([null_space(phi[None, :]).T, phi])
    projected = lifts @ H.T
    points = np.unique(np.round(projected[:, :-1] / projected[:, -1:], 12), axis=0)

    hull = HullDomain(points, chart=AffineChart(Homography(H)))
    logger.info(
        f"Hull of {len(points)} limit points from {len(enumeration)} classes, "
        f"{len(hull.hull.vertices)} vertices, angular resolution {hull.angular_resolution:.3e}"
    )
    return hull


def fit_conic(points: np.ndarray) -> ConicFit:
    """Algebraic least-squares conic through planar points.

    Points are centred and scaled to unit RMS radius before the fit; the
    coefficients are the right singular vector of the smallest singular
    value.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[1] != 2 or len(points) < 6:
        msg = "A conic fit needs at least 6 planar points"
        raise InvalidSpecError(msg)
    shift = points.mean(axis=0)
    scale = float(np.sqrt(np.mean(np.sum((points - shift) ** 2, axis=1))))
    x, y = ((points - shift) / scale).T
    design = np.column_stack([x**2, x * y, y**2, x, y, np.ones_like(x)])
    _, singular, vt = np.linalg.svd(design, full_matrices=False)
    return ConicFit(vt[-1], float(singular[-1] / np.sqrt(len(points))), shift, scale)


def chart_action(domain: ConvexDomain, g: GroupElement) -> GroupElement:
    """``g`` acting in the chart in which ``domain`` is given."""
    H = domain.chart.homography
    return GroupElement((H @ g.homography @ H.inverse()).matrix, g.word)


def hull_invariance_gap(domain: HullDomain, generators: Sequence[GroupElement]) -> float:
    """Largest boundary-function value of the images of the hull vertices under the generators."""
    vertices = domain.vertices
    gap = 0.0
    for g in generators:
        moved = chart_action(domain, g).homography.apply_affine(vertices)
        gap = max(gap, float(np.max(np.abs(domain.implicit(moved)))))
    return gap
