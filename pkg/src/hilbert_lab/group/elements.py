"""Projective group elements and their eigenvalue data.

Words over the generators are strings: generator ``i`` is the letter
``chr(ord('a') + i)`` and its inverse the corresponding capital letter.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from hilbert_lab import const
from hilbert_lab.geometry.projective import Homography, ProjectivePoint
from hilbert_lab.utils.errors import (
    InvalidDeterminantError,
    NearDefectiveError,
    NotBiproximalError,
)
from hilbert_lab.utils.logging import get_logger

logger = get_logger("group.elements")


####################################################################################################
# WORDS
####################################################################################################


def letter(index: int, inverse: bool = False) -> str:
    char = chr(ord("a") + index)
    return char.upper() if inverse else char


def letter_index(char: str) -> int:
    return ord(char.lower()) - ord("a")


def invert_word(word: str) -> str:
    return word[::-1].swapcase()


####################################################################################################
# ELEMENTS
####################################################################################################


@dataclass(frozen=True, eq=False)
class GroupElement:
    """Matrix acting projectively, stored with ``|det| = 1``.

    Parameters
    ----------
    matrix : np.ndarray
        The (n+1)×(n+1) matrix; it is rescaled to unit absolute determinant.
    word : Optional[str]
        The generator word this element was evaluated from, if any.

    """

    matrix: np.ndarray
    word: Optional[str] = None

    def __post_init__(self) -> None:
        matrix = np.array(self.matrix, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            msg = f"Group element must be a square matrix, got shape {matrix.shape}"
            raise InvalidDeterminantError(msg)
        det = np.linalg.det(matrix)
        if not np.isfinite(det) or abs(det) < const.ZERO_VECTOR_TOL:
            msg = "Group element matrix is singular"
            raise InvalidDeterminantError(msg, {"det": float(det)})
        matrix = matrix / abs(det) ** (1.0 / matrix.shape[0])
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    @classmethod
    def identity(cls, n: int) -> "GroupElement":
        return cls(np.eye(n + 1), "")

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0] - 1

    @property
    def homography(self) -> Homography:
        return Homography(self.matrix)

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        word = None if self.word is None or other.word is None else self.word + other.word
        return GroupElement(self.matrix @ other.matrix, word)

    def inverse(self) -> "GroupElement":
        word = None if self.word is None else invert_word(self.word)
        return GroupElement(np.linalg.inv(self.matrix), word)

    def power(self, k: int) -> "GroupElement":
        base = self if k >= 0 else self.inverse()
        matrix = np.linalg.matrix_power(base.matrix, abs(k))
        word = None if base.word is None else base.word * abs(k)
        return GroupElement(matrix, word)

    def conjugate(self, h: "GroupElement") -> "GroupElement":
        """Return ``h self h⁻¹``."""
        return h @ self @ h.inverse()

    def __repr__(self) -> str:
        return f"GroupElement(word={self.word!r}, dimension={self.dimension})"


def evaluate_word(generators: Sequence[GroupElement], word: str) -> GroupElement:
    """Multiply out a word over the generators (and their inverses)."""
    n = generators[0].dimension
    matrix = np.eye(n + 1)
    inverses = {}
    for char in word:
        index = letter_index(char)
        if char.isupper():
            if index not in inverses:
                inverses[index] = np.linalg.inv(generators[index].matrix)
            matrix = matrix @ inverses[index]
        else:
            matrix = matrix @ generators[index].matrix
    return GroupElement(matrix, word)


####################################################################################################
# EIGENVALUES
####################################################################################################


@dataclass(frozen=True)
class EigenData:
    """Eigenvalues sorted by decreasing modulus, with the extreme eigenvectors."""

    eigenvalues: np.ndarray
    vectors: np.ndarray
    moduli: np.ndarray
    top_vector: ProjectivePoint
    bottom_vector: ProjectivePoint
    top_covector: np.ndarray
    bottom_covector: np.ndarray

    @property
    def log_moduli(self) -> np.ndarray:
        return np.log(self.moduli)


@dataclass(frozen=True)
class LyapunovTriple:
    """Closed-form exponents of a periodic orbit for one intermediate modulus cluster."""

    eta: float
    chi_plus: float
    chi_minus: float
    multiplicity: int = 1


def eigen_data(g: GroupElement) -> EigenData:
    """Eigen-decomposition with moduli sorted in decreasing order.

    Parameters
    ----------
    g : GroupElement
        The element.

    Returns
    -------
    EigenData
        Sorted eigenvalues, eigenvectors (columns) and moduli; the top and
        bottom eigenvectors as projective points, and the left eigenvectors of
        the top and bottom eigenvalues, which define the repelling hyperplanes
        of ``g`` and ``g⁻¹``.

    Raises
    ------
    NearDefectiveError
        If an extreme modulus is not separated from its neighbour by the
        relative gap tolerance.

    """
    values, vectors = np.linalg.eig(g.matrix)
    order = np.argsort(-np.abs(values), kind="stable")
    values = values[order]
    vectors = vectors[:, order]
    moduli = np.abs(values)

    top_gap = (moduli[0] - moduli[1]) / moduli[0]
    bottom_gap = (moduli[-2] - moduli[-1]) / moduli[-2]
    if top_gap < const.MODULUS_GAP_TOL or bottom_gap < const.MODULUS_GAP_TOL:
        msg = "Extreme eigenvalue moduli are not separated"
        raise NearDefectiveError(msg, {"moduli": moduli.tolist(), "word": g.word})

    cond = np.linalg.cond(vectors)
    if cond > const.CONDITION_WARN:
        logger.warning(f"Near-defective eigenbasis for {g.word!r} (condition number {cond:.3e})")

    left = np.linalg.inv(vectors)
    return EigenData(
        eigenvalues=values,
        vectors=vectors,
        moduli=moduli,
        top_vector=ProjectivePoint(vectors[:, 0].real),
        bottom_vector=ProjectivePoint(vectors[:, -1].real),
        top_covector=left[0].real / np.linalg.norm(left[0].real),
        bottom_covector=left[-1].real / np.linalg.norm(left[-1].real),
    )


def is_biproximal(g: GroupElement) -> bool:
    """Whether the extreme eigenvalue moduli of ``g`` are simple."""
    try:
        eigen_data(g)
    except NearDefectiveError:
        return False
    return True


def _biproximal_data(g: GroupElement) -> EigenData:
    try:
        return eigen_data(g)
    except NearDefectiveError as e:
        msg = "Element is not biproximal"
        raise NotBiproximalError(msg, e.details) from e


def translation_length(g: GroupElement) -> float:
    """Translation length ``½ (log |λ₁| - log |λ_{n+1}|)`` along the axis.

    Raises
    ------
    NotBiproximalError
        If ``g`` is not biproximal.

    """
    moduli = _biproximal_data(g).moduli
    return float(0.5 * (np.log(moduli[0]) - np.log(moduli[-1])))


def periodic_lyapunov(g: GroupElement) -> List[LyapunovTriple]:
    """Closed-form transport exponents of the periodic orbit of ``g``.

    For each cluster of intermediate moduli ``λ_i``,
    ``η_i = -1 + 2 (log λ₀ - log λ_i) / (log λ₀ - log λ_{n})`` and
    ``χ±_i = ±1 + η_i``.

    Raises
    ------
    NotBiproximalError
        If ``g`` is not biproximal.

    """
    logs = _biproximal_data(g).log_moduli
    span = logs[0] - logs[-1]

    clusters: List[List[float]] = []
    for value in logs[1:-1]:
        if clusters and abs(clusters[-1][-1] - value) < const.MODULUS_CLUSTER_TOL:
            clusters[-1].append(value)
        else:
            clusters.append([value])

    triples = []
    for cluster in clusters:
        eta = -1.0 + 2.0 * (logs[0] - float(np.mean(cluster))) / span
        triples.append(LyapunovTriple(eta, 1.0 + eta, -1.0 + eta, len(cluster)))
    return triples


####################################################################################################
# EMBEDDINGS
####################################################################################################

# Basis of 2×2 symmetric matrices in which det(S) = z² - x² - y².
_SYMMETRIC_BASIS = (
    np.array([[1.0, 0.0], [0.0, -1.0]]),
    np.array([[0.0, 1.0], [1.0, 0.0]]),
    np.eye(2),
)


def so21_embed(a: float, b: float, c: float, d: float) -> GroupElement:
    """Image of ``[[a, b], [c, d]]`` in SO(2,1) through ``S ↦ A S Aᵀ``.

    The image preserves ``z² - x² - y²``, hence the Klein disk in the chart
    ``z = 1``; an element with eigenvalues ``(λ, 1/λ)`` maps to moduli
    ``(λ², 1, λ⁻²)``.

    Raises
    ------
    InvalidDeterminantError
        If ``ad - bc`` differs from 1.

    """
    A = np.array([[a, b], [c, d]], dtype=float)
    det = float(np.linalg.det(A))
    if abs(det - 1.0) > const.DETERMINANT_TOL:
        msg = f"so21_embed needs a unit-determinant matrix, got det={det}"
        raise InvalidDeterminantError(msg)

    columns = []
    for basis in _SYMMETRIC_BASIS:
        S = A @ basis @ A.T
        columns.append([(S[0, 0] - S[1, 1]) / 2, S[0, 1], (S[0, 0] + S[1, 1]) / 2])
    return GroupElement(np.array(columns).T)
