"""
Test parallel transport along orbits and the transverse exponents
"""
import numpy as np
import pytest

from hilbert_lab.dynamics import (
    FlowState,
    anosov_rates,
    axis_transport_curve,
    eta_estimate,
    flip,
    flow_orbit,
    periodic_transport_curve,
    sample_states,
    transport_factor,
    transport_norm_curve,
    transport_ratio_band,
)
from hilbert_lab.geometry.metric import MetricContext
from hilbert_lab.group import (
    chart_action,
    enumerate_conjugacy_classes,
    generate_domain_hull,
    is_biproximal,
    periodic_lyapunov,
)
from hilbert_lab.utils.errors import (
    DegenerateDirectionError,
    InsufficientSamplesError,
    InvalidParameterError,
    NotBiproximalError,
    PrecisionLossError,
)


@pytest.fixture(scope="module")
def state():
    return FlowState(np.array([0.1, 0.3]), np.array([1.0, -0.4]))


def _first_biproximal(family, max_len=4):
    enumeration = enumerate_conjugacy_classes(family.generators, max_len, family.presentation)
    return next(c.element for c in enumeration if is_biproximal(c.element))


class TestOrbitTransport:
    def test_norm_is_constant_on_disk(self, disk_ctx, state):
        record = transport_norm_curve(disk_ctx, state, np.array([0.0, 1.0]), horizon=15.0)
        np.testing.assert_allclose(record.transport_norm, 1.0, rtol=1e-6)
        estimate = eta_estimate(record)
        assert estimate.eta == pytest.approx(0.0, abs=1e-6)
        assert estimate.chi_plus == pytest.approx(1.0, abs=1e-6)
        assert estimate.chi_minus == pytest.approx(-1.0, abs=1e-6)

    def test_disk_norm_at_long_horizon(self, disk_ctx, state):
        record = transport_norm_curve(disk_ctx, state, np.array([0.0, 1.0]), horizon=20.0)
        assert np.all(np.isfinite(record.transport_norm))
        np.testing.assert_allclose(record.transport_norm, 1.0, atol=1e-6)
        assert record.chord_plus[-1] < 1e-16

    def test_quartic_axis_exponent(self, quartic_ctx):
        w = FlowState(np.zeros(2), np.array([1.0, 0.0]))
        record = transport_norm_curve(quartic_ctx, w, np.array([0.0, 1.0]), horizon=20.0)
        estimate = eta_estimate(record)
        assert np.isfinite(estimate.eta)
        assert estimate.eta == pytest.approx(-0.5, abs=1e-2)

    def test_reversed_orbit_negates_exponent(self, quartic_ctx, state):
        v0 = np.array([0.0, 1.0])
        record = transport_norm_curve(quartic_ctx, state, v0, horizon=8.0, steps=160)
        end = flow_orbit(quartic_ctx, state, np.array([8.0]))[0]
        reversed_record = transport_norm_curve(quartic_ctx, flip(end), v0, horizon=8.0, steps=160)
        expected = record.transport_norm[::-1] / record.transport_norm[-1]
        np.testing.assert_allclose(reversed_record.transport_norm, expected, rtol=1e-5)
        forward = eta_estimate(record, transient_fraction=0.0)
        backward = eta_estimate(reversed_record, transient_fraction=0.0)
        assert forward.eta + backward.eta == pytest.approx(0.0, abs=2e-3)

    def test_underflowing_orbit_raises(self, disk_ctx, state):
        with pytest.raises(PrecisionLossError):
            transport_norm_curve(disk_ctx, state, np.array([0.0, 1.0]), horizon=400.0)

    def test_record_layout(self, quartic_ctx, state):
        record = transport_norm_curve(quartic_ctx, state, np.array([0.0, 1.0]), horizon=10.0, steps=50)
        assert len(record) == 51
        assert record.transport_norm[0] == pytest.approx(1.0)
        np.testing.assert_allclose(record.unstable_norm, np.exp(record.times) * record.transport_norm)
        frame = record.to_frame()
        assert list(frame.columns) == ["t", "x1", "x2", "transport_norm", "stable_norm", "unstable_norm"]

    def test_factor_matches_curve(self, quartic_ctx, state):
        v0 = np.array([0.2, 1.0])
        record = transport_norm_curve(quartic_ctx, state, v0, horizon=4.0, steps=8)
        assert transport_factor(quartic_ctx, state, v0, 4.0) == pytest.approx(record.transport_norm[-1], rel=1e-9)

    def test_exponent_inside_unit_interval(self, quartic_ctx, state):
        record = transport_norm_curve(quartic_ctx, state, np.array([0.0, 1.0]), horizon=20.0)
        estimate = eta_estimate(record)
        assert -1.0 < estimate.eta < 1.0
        assert estimate.chi_plus - estimate.chi_minus == pytest.approx(2.0)
        assert estimate.samples == len(record) - int(np.ceil(0.2 * len(record)))

    def test_ratio_band_is_bounded(self, quartic_ctx, state):
        record = transport_norm_curve(quartic_ctx, state, np.array([0.0, 1.0]), horizon=20.0)
        low, high = transport_ratio_band(record)
        assert 0.0 < low <= 1.0 <= high < np.inf

    def test_vector_along_chord(self, disk_ctx, state):
        with pytest.raises(DegenerateDirectionError):
            transport_norm_curve(disk_ctx, state, state.direction, horizon=5.0)

    def test_invalid_horizon(self, disk_ctx, state):
        with pytest.raises(InvalidParameterError):
            transport_norm_curve(disk_ctx, state, np.array([0.0, 1.0]), horizon=0.0)

    @pytest.mark.parametrize("horizon,steps", [(20.0, 10), (2.0, 200)])
    def test_short_records_rejected(self, disk_ctx, state, horizon, steps):
        record = transport_norm_curve(disk_ctx, state, np.array([0.0, 1.0]), horizon=horizon, steps=steps)
        with pytest.raises(InsufficientSamplesError):
            eta_estimate(record)


def test_anosov_rates_on_disk(disk_ctx, state):
    alpha, beta = anosov_rates(disk_ctx, state, horizon=10.0)
    assert alpha == pytest.approx(1.0, abs=1e-6)
    assert beta == pytest.approx(1.0, abs=1e-6)


def test_anosov_rates_positive(quartic_ctx, rng):
    for w in sample_states(quartic_ctx, rng, 5):
        alpha, beta = anosov_rates(quartic_ctx, w, horizon=10.0)
        assert alpha > 0
        assert beta > 0


class TestPeriodicTransport:
    def test_matches_eigenvalue_exponent(self, deformed_group):
        g = _first_biproximal(deformed_group)
        expected = periodic_lyapunov(g)[0].eta
        record = periodic_transport_curve(g, periods=100)
        assert eta_estimate(record).eta == pytest.approx(expected, abs=1e-3)

    def test_hyperbolic_orbit_has_zero_exponent(self, rotation_group):
        g = _first_biproximal(rotation_group)
        assert periodic_lyapunov(g)[0].eta == pytest.approx(0.0, abs=1e-9)
        record = periodic_transport_curve(g, periods=60)
        assert eta_estimate(record).eta == pytest.approx(0.0, abs=1e-4)

    def test_elliptic_generator_rejected(self, rotation_group):
        with pytest.raises(NotBiproximalError):
            periodic_transport_curve(rotation_group.generators[0])

    @pytest.mark.parametrize("kwargs", [{"direction": 0}, {"direction": 2}, {"start": 1.5}, {"periods": 0}])
    def test_invalid_parameters(self, deformed_group, kwargs):
        g = _first_biproximal(deformed_group)
        with pytest.raises(InvalidParameterError):
            periodic_transport_curve(g, **kwargs)


class TestAxisTransport:
    @pytest.fixture(scope="class")
    def deformed_hull(self, deformed_group):
        family = deformed_group
        return MetricContext(generate_domain_hull(family.generators, 6, family.presentation, family.base_point))

    def test_norm_is_constant_on_disk(self, disk_ctx, rotation_group):
        g = _first_biproximal(rotation_group)
        record = axis_transport_curve(disk_ctx, g, periods=40)
        np.testing.assert_allclose(record.transport_norm, 1.0, rtol=1e-6)
        assert np.all(np.linalg.norm(record.points, axis=1) <= 1 + 1e-12)

    def test_matches_eigenvalue_exponent(self, deformed_group, deformed_hull):
        g = _first_biproximal(deformed_group)
        record = axis_transport_curve(deformed_hull, chart_action(deformed_hull.domain, g))
        assert eta_estimate(record).eta == pytest.approx(periodic_lyapunov(g)[0].eta, abs=1e-3)

    def test_elliptic_generator_rejected(self, disk_ctx, rotation_group):
        with pytest.raises(NotBiproximalError):
            axis_transport_curve(disk_ctx, rotation_group.generators[0])

    @pytest.mark.parametrize("kwargs", [{"start": 0.0}, {"periods": 0}, {"samples_per_period": 0}])
    def test_invalid_parameters(self, disk_ctx, rotation_group, kwargs):
        g = _first_biproximal(rotation_group)
        with pytest.raises(InvalidParameterError):
            axis_transport_curve(disk_ctx, g, **kwargs)

    @pytest.mark.slow
    def test_many_words(self, deformed_group):
        family = deformed_group
        ctx = MetricContext(generate_domain_hull(family.generators, 8, family.presentation, family.base_point))
        enumeration = enumerate_conjugacy_classes(family.generators, 8, family.presentation)
        elements = [c.element for c in enumeration if is_biproximal(c.element)][:25]
        assert len(elements) >= 20
        for g in elements:
            record = axis_transport_curve(ctx, chart_action(ctx.domain, g))
            assert eta_estimate(record).eta == pytest.approx(periodic_lyapunov(g)[0].eta, abs=1e-3), g.word
