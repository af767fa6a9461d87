"""Generator families: hyperbolic triangle groups and their convex projective deformations."""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from hilbert_lab.group.elements import GroupElement, letter, so21_embed
from hilbert_lab.utils.errors import InvalidParameterError, InvalidSpecError, NotHyperbolicTypeError
from hilbert_lab.utils.logging import get_logger

logger = get_logger("group.families")


@dataclass(frozen=True)
class Presentation:
    """Finite presentation used to shorten words during enumeration.

    Parameters
    ----------
    orders : List[Optional[int]]
        Order of each generator, ``None`` for infinite order.
    relators : List[str]
        Relator words besides the generator orders.

    """

    orders: List[Optional[int]]
    relators: List[str] = field(default_factory=list)

    @property
    def rank(self) -> int:
        return len(self.orders)

    @classmethod
    def free(cls, rank: int) -> "Presentation":
        return cls([None] * rank)


@dataclass(frozen=True)
class GeneratorFamily:
    """Generators together with the presentation they satisfy."""

    generators: List[GroupElement]
    presentation: Presentation
    base_point: Optional[np.ndarray] = None  # homogeneous lift of an interior point


def _check_hyperbolic(p: int, q: int, r: int) -> None:
    if min(p, q, r) < 2:
        msg = f"Triangle orders must be at least 2, got ({p}, {q}, {r})"
        raise InvalidParameterError(msg)
    # Integer form of 1/p + 1/q + 1/r >= 1.
    if q * r + p * r + p * q >= p * q * r:
        msg = f"Triangle ({p}, {q}, {r}) is not hyperbolic: 1/p + 1/q + 1/r >= 1"
        raise NotHyperbolicTypeError(msg)


def _rotation(angle: float) -> Tuple[float, float, float, float]:
    c, s = np.cos(angle), np.sin(angle)
    return c, s, -s, c


def triangle_rotation_group(p: int, q: int, r: int) -> GeneratorFamily:
    """Orientation-preserving triangle group ``⟨a, b | a^p, b^q, (ab)^r⟩`` in SO(2,1).

    ``a`` rotates by ``2π/p`` about the origin of the Klein disk and ``b``
    by ``2π/q`` about the point at hyperbolic distance ``d`` on the first
    axis, where ``cosh d = (cos π/r + cos π/p cos π/q) / (sin π/p sin π/q)``
    is the side of the triangle with angles ``π/p, π/q, π/r``; then ``ab``
    is a rotation by ``2π/r``.

    Raises
    ------
    NotHyperbolicTypeError
        If ``1/p + 1/q + 1/r >= 1``.

    """
    _check_hyperbolic(p, q, r)
    alpha, beta, gamma = np.pi / p, np.pi / q, np.pi / r
    cosh_d = (np.cos(gamma) + np.cos(alpha) * np.cos(beta)) / (np.sin(alpha) * np.sin(beta))
    half = 0.5 * np.arccosh(cosh_d)

    a = so21_embed(*_rotation(alpha))
    rc, rs, _, _ = _rotation(beta)
    # T R(β) T⁻¹ with T = diag(e^{d/2}, e^{-d/2}).
    b = so21_embed(rc, np.exp(2 * half) * rs, -np.exp(-2 * half) * rs, rc)

    a = GroupElement(a.matrix, letter(0))
    b = GroupElement(b.matrix, letter(1))
    relator = (letter(0) + letter(1)) * r
    logger.debug(f"Triangle rotation group ({p}, {q}, {r}) with side cosh {cosh_d:.6f}")
    return GeneratorFamily([a, b], Presentation([p, q], [relator]), np.array([0.0, 0.0, 1.0]))


def cartan_matrix(p: int, q: int, r: int, s: float = 1.0) -> np.ndarray:
    """Cartan matrix of the triangle reflection group with edge (0, 1) split by ``s``.

    Mirror pairs (0, 1), (1, 2), (0, 2) meet at angles ``π/p, π/q, π/r``;
    ``A_ii = 2``, ``A_ij = -2 cos(π/m_ij)``, except ``A_01 = -2 c s`` and
    ``A_10 = -2 c / s`` with ``c = cos(π/p)``.
    """
    A = 2.0 * np.eye(3)
    for (i, j), m in (((0, 1), p), ((1, 2), q), ((0, 2), r)):
        A[i, j] = A[j, i] = -2.0 * np.cos(np.pi / m)
    A[0, 1] *= s
    A[1, 0] /= s
    return A


def triangle_reflection_family(p: int, q: int, r: int, s: float = 1.0) -> GeneratorFamily:
    """Reflections ``σ_i = I - e_i A_i`` generating a triangle group in PGL(3, R).

    At ``s = 1`` the Cartan matrix is symmetric, the reflections preserve
    the quadratic form it defines and the invariant domain is an ellipse;
    other values of ``s`` give strictly convex, non-conic divisible domains.
    The returned base point ``A⁻¹ 1`` lies in the fundamental chamber.

    Raises
    ------
    NotHyperbolicTypeError
        If ``1/p + 1/q + 1/r >= 1``.
    InvalidParameterError
        If ``s <= 0``.

    """
    _check_hyperbolic(p, q, r)
    if s <= 0:
        msg = f"Deformation parameter must be positive, got {s}"
        raise InvalidParameterError(msg)

    A = cartan_matrix(p, q, r, s)
    generators = []
    for i in range(3):
        sigma = np.eye(3)
        sigma[i] -= A[i]
        generators.append(GroupElement(sigma, letter(i)))

    relators = [
        (letter(0) + letter(1)) * p,
        (letter(1) + letter(2)) * q,
        (letter(0) + letter(2)) * r,
    ]
    chamber = np.linalg.solve(A, np.ones(3))
    logger.debug(f"Triangle reflection family ({p}, {q}, {r}) at s={s}")
    return GeneratorFamily(generators, Presentation([2, 2, 2], relators), chamber)


FAMILIES = ["triangle_rotation", "triangle_reflection", "matrices"]


def make_family(spec: Dict[str, Any]) -> GeneratorFamily:
    """Construct generators from a group description.

    Supported descriptions::

        {family: triangle_rotation, p: 3, q: 3, r: 4}
        {family: triangle_reflection, p: 3, q: 3, r: 4, s: 2.0}
        {family: matrices, generators: [[[...]], ...], orders: [...], relators: [...]}

    Raises
    ------
    InvalidSpecError
        If the family is unknown or a field is missing or malformed.

    """
    if not isinstance(spec, dict) or not spec:
        msg = "Group description must be a non-empty mapping"
        raise InvalidSpecError(msg)

    family = spec.get("family")
    if family not in FAMILIES:
        msg = f"Unknown group family: {family}"
        raise InvalidSpecError(msg, {"supported": FAMILIES})

    try:
        if family == "triangle_rotation":
            return triangle_rotation_group(int(spec["p"]), int(spec["q"]), int(spec["r"]))
        if family == "triangle_reflection":
            return triangle_reflection_family(
                int(spec["p"]), int(spec["q"]), int(spec["r"]), float(spec.get("s", 1.0))
            )
        matrices = [np.asarray(m, dtype=float) for m in spec["generators"]]
    except KeyError as e:
        msg = f"Group description is missing {e}"
        raise InvalidSpecError(msg, {"family": family}) from e
    except (TypeError, ValueError) as e:
        msg = "Group description has a malformed field"
        raise InvalidSpecError(msg, {"family": family, "reason": str(e)}) from e

    if not matrices or any(m.ndim != 2 or m.shape[0] != m.shape[1] for m in matrices):
        msg = "Generators must be square matrices"
        raise InvalidSpecError(msg)
    generators = [GroupElement(m, letter(i)) for i, m in enumerate(matrices)]
    orders = spec.get("orders") or [None] * len(generators)
    if len(orders) != len(generators):
        msg = f"{len(orders)} generator orders given for {len(generators)} generators"
        raise InvalidSpecError(msg)
    base_point = spec.get("base_point")
    return GeneratorFamily(
        generators,
        Presentation(list(orders), list(spec.get("relators") or [])),
        None if base_point is None else np.asarray(base_point, dtype=float),
    )
