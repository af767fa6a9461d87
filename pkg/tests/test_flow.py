"""
Test the geodesic flow, the flip and the curvature of the flow
"""
import numpy as np
import pytest

from hilbert_lab.dynamics import (
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
from hilbert_lab.geometry.metric import MetricContext, hilbert_distance, hilbert_distances
from hilbert_lab.utils.errors import InvalidParameterError, InvalidSpecError, NotInteriorError


@pytest.fixture
def state():
    return FlowState(np.array([0.2, -0.1]), np.array([1.0, 0.5]))


def test_state_direction_is_normalized():
    w = FlowState(np.zeros(2), np.array([3.0, 4.0]))
    np.testing.assert_allclose(w.direction, [0.6, 0.8])


def test_zero_direction_rejected():
    with pytest.raises(InvalidParameterError):
        FlowState(np.zeros(2), np.zeros(2))


@pytest.mark.parametrize("t", [0.5, 3.0, 8.0, -4.0])
def test_flow_moves_at_unit_speed(quartic_ctx, state, t):
    moved = flow_point(quartic_ctx, state, t)
    assert hilbert_distance(quartic_ctx, state.x, moved.x) == pytest.approx(abs(t), rel=1e-7)
    np.testing.assert_allclose(moved.direction, state.direction)


def test_flow_is_a_one_parameter_group(quartic_ctx, state):
    twice = flow_point(quartic_ctx, flow_point(quartic_ctx, state, 1.5), 2.0)
    once = flow_point(quartic_ctx, state, 3.5)
    np.testing.assert_allclose(twice.x, once.x, atol=1e-10)
    back = flow_point(quartic_ctx, once, -3.5)
    np.testing.assert_allclose(back.x, state.x, atol=1e-10)


def test_orbit_matches_pointwise_flow(disk_ctx, state):
    times = np.array([-2.0, 0.0, 1.0, 4.0])
    orbit = flow_orbit(disk_ctx, state, times)
    for t, w in zip(times, orbit):
        np.testing.assert_allclose(w.x, flow_point(disk_ctx, state, t).x, atol=1e-12)


def test_flip_reverses_the_flow(disk_ctx, state):
    assert np.allclose(flip(flip(state)).direction, state.direction)
    forward = flow_point(disk_ctx, flip(state), 2.0)
    backward = flow_point(disk_ctx, state, -2.0)
    np.testing.assert_allclose(forward.x, backward.x, atol=1e-12)


def test_flow_requires_interior(disk_ctx):
    with pytest.raises(NotInteriorError):
        flow_point(disk_ctx, FlowState(np.array([2.0, 0.0]), np.array([1.0, 0.0])), 1.0)


def test_flow_undefined_on_polytope(square):
    with pytest.raises(InvalidSpecError):
        flow_point(MetricContext(square), FlowState(np.zeros(2), np.array([1.0, 0.0])), 1.0)


class TestCurvature:
    def test_constant_on_disk(self, disk_ctx, rng):
        values = [curvature_scalar(disk_ctx, w) for w in sample_states(disk_ctx, rng, 200)]
        np.testing.assert_allclose(values, -1.0, atol=1e-12)

    def test_constant_on_non_riemannian_domain(self, quartic_ctx, lens, rng):
        for ctx in (quartic_ctx, MetricContext(lens)):
            values = [curvature_scalar(ctx, w) for w in sample_states(ctx, rng, 100)]
            np.testing.assert_allclose(values, -1.0, atol=1e-12)

    def test_log_m_derivative(self, quartic_ctx, state):
        numeric, closed = log_m_derivative(quartic_ctx, state)
        assert numeric == pytest.approx(closed, rel=1e-6, abs=1e-8)


def test_leading_coefficient(quartic_ctx, state):
    measured, predicted, halved = leading_coefficient(quartic_ctx, state, t=6.0)
    assert measured == pytest.approx(predicted, rel=1e-4)
    assert halved == pytest.approx(predicted / 2)


class TestTangentFlow:
    def test_stable_and_unstable_rates_on_disk(self, disk_ctx, state):
        z = TangentVector(state, np.array([1.0]), np.array([1.0]), flow_part=0.5)
        moved = tangent_flow(disk_ctx, z, 2.0)
        assert moved.stable_part[0] == pytest.approx(np.exp(-2.0), rel=1e-6)
        assert moved.unstable_part[0] == pytest.approx(np.exp(2.0), rel=1e-6)
        assert moved.flow_part == 0.5

    def test_zero_time_is_identity(self, quartic_ctx, state):
        z = TangentVector(state, np.array([0.3]), np.array([-0.2]))
        assert tangent_flow(quartic_ctx, z, 0.0) is z

    def test_frame_is_orthogonal_to_direction(self, state):
        z = TangentVector(state, np.array([1.0]), np.array([0.0]))
        np.testing.assert_allclose(z.frame @ state.direction, 0.0, atol=1e-12)
        assert z.norm() == pytest.approx(1.0)


def test_sample_states(quartic_ctx, rng):
    states = sample_states(quartic_ctx, rng, 30)
    assert len(states) == 30
    assert all(quartic_ctx.space.contains(w.x) for w in states)


@pytest.mark.slow
class TestRandomStates:
    def test_flow_exactness(self, disk_ctx, quartic_ctx, rng):
        for ctx in (disk_ctx, quartic_ctx):
            states = sample_states(ctx, rng, 5000)
            s, t = rng.uniform(-3.0, 3.0, size=(2, len(states)))
            start = np.array([w.x for w in states])
            moved = [flow_point(ctx, w, ti) for w, ti in zip(states, t)]
            end = np.array([w.x for w in moved])
            np.testing.assert_allclose(hilbert_distances(ctx, start, end), np.abs(t), atol=1e-10)

            chained = np.array([flow_point(ctx, w, si).x for w, si in zip(moved, s)])
            direct = np.array([flow_point(ctx, w, ti + si).x for w, ti, si in zip(states, t, s)])
            np.testing.assert_allclose(chained, direct, atol=1e-10)

    def test_curvature_is_constant(self, disk_ctx, quartic_ctx, ball3, lens, rng):
        for ctx in (disk_ctx, quartic_ctx, MetricContext(ball3), MetricContext(lens)):
            values = [curvature_scalar(ctx, w) for w in sample_states(ctx, rng, 10_000)]
            np.testing.assert_allclose(values, -1.0, atol=1e-9)
