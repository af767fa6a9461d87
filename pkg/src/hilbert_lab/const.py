####################################################################################################
# TOLERANCES
####################################################################################################

# Interior test: a point is interior when the implicit function is below -INTERIOR_TOL.
INTERIOR_TOL = 1e-12

# Points closer than this to the boundary function zero set count as boundary points.
BOUNDARY_TOL = 1e-10

# Rank test for collinearity of lifted homogeneous vectors.
COLLINEAR_TOL = 1e-10

# Homogeneous vectors with a smaller norm are treated as the zero vector.
ZERO_VECTOR_TOL = 1e-14

# Condition number above which a homography is reported as ill-conditioned.
CONDITION_WARN = 1e12

# Relative gap between extreme eigenvalue moduli below which an element is not biproximal.
MODULUS_GAP_TOL = 1e-8

# Clustering tolerance (on log-moduli) for intermediate eigenvalues.
MODULUS_CLUSTER_TOL = 1e-8

# Determinant tolerance for group elements after normalization.
DETERMINANT_TOL = 1e-9

####################################################################################################
# ORACLES
####################################################################################################

BISECTION_ITERATIONS = 80
BRACKET_DOUBLINGS = 200
FINITE_DIFFERENCE_STEP = 1e-7

####################################################################################################
# QUADRATURE
####################################################################################################

ANGULAR_SAMPLES_2D = 4096
SPHERE_NODES_3D = 5810
SUPPORTED_VOLUME_DIMENSIONS = (2, 3)

####################################################################################################
# ESTIMATION
####################################################################################################

# Fraction of the earliest samples discarded before exponent regressions.
TRANSIENT_FRACTION = 0.2
MIN_RECORD_SAMPLES = 20
MIN_RECORD_HORIZON = 5.0

# Default geometric scale grid for boundary exponents: 2^-k, k in SCALE_EXPONENTS,
# fit on k in FIT_EXPONENTS.
SCALE_EXPONENTS = tuple(range(4, 25))
FIT_EXPONENTS = tuple(range(10, 25))
MIN_SCALE = 1e-10

# beta-convexity sampling
BETA_PAIRS = 1000
BETA_MAX_SEPARATION = 0.1
BETA_MIN_SEPARATION = 1e-4
BETA_TOLERANCE = 0.05

# Volume entropy
MC_SAMPLES_PER_BALL = 100_000
MC_DENSITY_SAMPLES_2D = 256
MC_DENSITY_SAMPLES_3D = 302
MC_MAX_RELATIVE_ERROR = 0.10
MIN_VOLUME_RADIUS = 4.0

# Orbit counting
MAX_WORD_LENGTH = 16
MAX_ENUMERATION = 10**7
MIN_SPECTRUM_SIZE = 50

####################################################################################################
# DOMAIN KINDS
####################################################################################################

domain_kinds = [
    "ellipsoid",
    "polytope",
    "p_ball",
    "boundary_curve",
    "lens",
    "hull",
    "transformed",
]
domain_kind_ids = {kind: i for i, kind in enumerate(domain_kinds)}

# Kinds on which the geodesic flow is defined.
flow_kinds = ["ellipsoid", "p_ball", "boundary_curve", "lens", "hull", "transformed"]

####################################################################################################
# OUTPUT
####################################################################################################

SVG_VIEWBOX = 1000
CSV_COMMENT = "#"
