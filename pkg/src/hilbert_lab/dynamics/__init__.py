from hilbert_lab.dynamics.flow import (
    FlowState,
    TangentVector,
    curvature_scalar,
    flip,
    flow_orbit,
    flow_point,
    leading_coefficient,
    log_m_derivative,
    sample_states,
    tangent_flow,
)
from hilbert_lab.dynamics.transport import (
    ExponentEstimate,
    OrbitRecord,
    anosov_rates,
    axis_transport_curve,
    eta_estimate,
    periodic_transport_curve,
    transport_factor,
    transport_norm_curve,
    transport_ratio_band,
)
