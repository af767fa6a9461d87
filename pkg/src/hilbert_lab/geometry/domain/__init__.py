from hilbert_lab.geometry.domain.base import ChordEndpoints, ConvexDomain
from hilbert_lab.geometry.domain.curve import BoundaryCurve
from hilbert_lab.geometry.domain.ellipsoid import Ellipsoid
from hilbert_lab.geometry.domain.factory import make_domain
from hilbert_lab.geometry.domain.hull import HullDomain
from hilbert_lab.geometry.domain.lens import Lens
from hilbert_lab.geometry.domain.pball import PBall
from hilbert_lab.geometry.domain.polytope import Polytope
from hilbert_lab.geometry.domain.transformed import TransformedDomain
