from hilbert_lab.boundary.shape import (
    ShapeExponent,
    beta_convexity,
    beta_from_exponents,
    entropy_lower_bound,
    local_convexity_exponents,
    shape_exponent,
)
