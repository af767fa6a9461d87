from typing import Any, Dict

import numpy as np

from hilbert_lab import const
from hilbert_lab.geometry.domain.base import ConvexDomain
from hilbert_lab.geometry.domain.curve import BoundaryCurve
from hilbert_lab.geometry.domain.ellipsoid import Ellipsoid
from hilbert_lab.geometry.domain.hull import HullDomain
from hilbert_lab.geometry.domain.lens import Lens
from hilbert_lab.geometry.domain.pball import PBall
from hilbert_lab.geometry.domain.polytope import Polytope
from hilbert_lab.geometry.domain.transformed import TransformedDomain
from hilbert_lab.geometry.projective import Homography
from hilbert_lab.utils.errors import InvalidSpecError, LabError
from hilbert_lab.utils.logging import get_logger

logger = get_logger("geometry.domain")


def _array(spec: Dict[str, Any], key: str, required: bool = True) -> Any:
    if key not in spec:
        if required:
            msg = f"Domain description is missing '{key}'"
            raise InvalidSpecError(msg, {"kind": spec.get("kind")})
        return None
    try:
        return np.asarray(spec[key], dtype=float)
    except (TypeError, ValueError) as e:
        msg = f"Domain field '{key}' is not numeric"
        raise InvalidSpecError(msg) from e


def _dimension(spec: Dict[str, Any]) -> int:
    n = spec.get("n", 2)
    if not isinstance(n, int) or n < 2:
        msg = f"Domain dimension must be an integer n ≥ 2, got {n}"
        raise InvalidSpecError(msg)
    return n


def make_domain(spec: Dict[str, Any]) -> ConvexDomain:
    """Construct a domain from its description.

    Supported descriptions::

        {kind: ellipsoid, n: 2, matrix: [[...]], center: [...]}
        {kind: polytope, vertices: [[...], ...]}
        {kind: p_ball, n: 2, p: 4}
        {kind: boundary_curve, radii: [...], center: [...]}
        {kind: lens, a: 0.25, c: 1.0, length: 2.0}
        {kind: hull, points: [[...], ...]}
        {kind: transformed, base: {...}, matrix: [[...]]}

    Parameters
    ----------
    spec : Dict[str, Any]
        The domain description.

    Returns
    -------
    ConvexDomain
        The constructed domain.

    Raises
    ------
    InvalidSpecError
        If the kind is unknown or a parameter is invalid.

    """
    if not isinstance(spec, dict):
        msg = "Domain description must be a mapping"
        raise InvalidSpecError(msg)

    kind = spec.get("kind")
    if kind not in const.domain_kinds:
        msg = f"Unknown domain kind: {kind}"
        raise InvalidSpecError(msg, {"supported": const.domain_kinds})

    if kind == "ellipsoid":
        domain: ConvexDomain = Ellipsoid(
            _dimension(spec),
            matrix=_array(spec, "matrix", required=False),
            center=_array(spec, "center", required=False),
        )
    elif kind == "polytope":
        domain = Polytope(_array(spec, "vertices"))
    elif kind == "p_ball":
        if "p" not in spec:
            msg = "p_ball description is missing 'p'"
            raise InvalidSpecError(msg)
        domain = PBall(_dimension(spec), float(spec["p"]), center=_array(spec, "center", required=False))
    elif kind == "boundary_curve":
        domain = BoundaryCurve(_array(spec, "radii"), center=_array(spec, "center", required=False))
    elif kind == "lens":
        domain = Lens(
            a=float(spec.get("a", 0.25)),
            c=float(spec.get("c", 1.0)),
            length=float(spec.get("length", 2.0)),
        )
    elif kind == "hull":
        domain = HullDomain(_array(spec, "points"))
    else:
        base = make_domain(spec.get("base") or {})
        try:
            homography = Homography.from_matrix(_array(spec, "matrix"))
        except LabError as e:
            msg = "Transformed domain matrix is invalid"
            raise InvalidSpecError(msg, {"reason": str(e)}) from e
        domain = TransformedDomain(base, homography)

    if not domain.contains(domain.center):
        msg = "Domain center is not interior"
        raise InvalidSpecError(msg, {"kind": kind})

    logger.debug(f"Constructed {domain!r}")
    return domain
