"""
Test homogeneous points, homographies, cross-ratios and affine charts
"""
import numpy as np
import pytest

from hilbert_lab.geometry.metric import MetricContext, hilbert_distance
from hilbert_lab.geometry.projective import (
    AffineChart,
    Homography,
    Hyperplane,
    ProjectivePoint,
    adapted_chart,
    cross_ratio,
)
from hilbert_lab.utils.errors import (
    ChartFailureError,
    DegenerateConfigurationError,
    InvalidParameterError,
    NotCollinearError,
    TangentUnavailableError,
)

GENERIC = np.array([[1.2, 0.3, -0.1], [0.2, 0.9, 0.4], [0.05, -0.1, 1.1]])


def test_point_equality_ignores_scale():
    p = ProjectivePoint(np.array([1.0, -2.0, 3.0]))
    q = ProjectivePoint(np.array([-2.0, 4.0, -6.0]))
    assert p == q
    np.testing.assert_allclose(p.affine(), [1 / 3, -2 / 3])


def test_zero_vector_rejected():
    with pytest.raises(InvalidParameterError):
        ProjectivePoint(np.zeros(3))


def test_point_at_infinity_has_no_affine_coordinates():
    with pytest.raises(ChartFailureError):
        ProjectivePoint(np.array([1.0, 0.0, 0.0])).affine()


class TestHomography:
    def test_determinant_normalized(self):
        g = Homography(3.0 * GENERIC)
        assert abs(np.linalg.det(g.matrix)) == pytest.approx(1.0)

    def test_equal_up_to_sign(self):
        assert Homography(GENERIC) == Homography(-GENERIC)
        assert Homography.from_matrix(GENERIC.tolist()) == Homography(GENERIC)

    def test_inverse_composes_to_identity(self):
        g = Homography(GENERIC)
        assert g @ g.inverse() == Homography.identity(2)

    def test_singular_matrix_rejected(self):
        with pytest.raises(DegenerateConfigurationError):
            Homography(np.array([[1.0, 2.0], [2.0, 4.0]]))

    def test_apply_matches_apply_affine(self):
        g = Homography(GENERIC)
        x = np.array([0.3, -0.2])
        np.testing.assert_allclose(g.apply(x).affine(), g.apply_affine(x)[0])


class TestCrossRatio:
    def test_value_on_a_line(self):
        assert cross_ratio([-1.0], [1.0], [0.0], [0.5]) == pytest.approx(1 / 3)

    def test_invariant_under_homography(self):
        g = Homography(GENERIC)
        pts = [np.array([t, 0.5 * t - 0.1]) for t in (-0.6, 0.7, 0.1, 0.35)]
        before = cross_ratio(*pts)
        after = cross_ratio(*(g.apply(p) for p in pts))
        assert after == pytest.approx(before, rel=1e-9)

    @pytest.fixture
    def quadruples(self, rng):
        return rng.uniform(-5.0, 5.0, size=(200, 5, 1))

    def test_cocycle(self, quadruples):
        for a, b, x, y, z in quadruples:
            product = cross_ratio(a, b, x, y) * cross_ratio(a, b, y, z)
            assert product == pytest.approx(cross_ratio(a, b, x, z), rel=1e-9)

    def test_permutations(self, quadruples):
        for a, b, x, y, _ in quadruples:
            value = cross_ratio(a, b, x, y)
            assert cross_ratio(b, a, y, x) == pytest.approx(value, rel=1e-9)
            assert cross_ratio(x, y, a, b) == pytest.approx(value, rel=1e-9)
            assert cross_ratio(b, a, x, y) == pytest.approx(1 / value, rel=1e-9)
            assert cross_ratio(a, b, y, x) == pytest.approx(1 / value, rel=1e-9)
            assert value + cross_ratio(a, x, b, y) == pytest.approx(1.0, abs=1e-9 * max(1.0, abs(value)))

    def test_identities_on_a_planar_line(self, rng):
        origin, direction = rng.normal(size=(2, 2))
        for params in rng.uniform(-2.0, 2.0, size=(50, 4)):
            a, b, x, y = (origin + p * direction for p in params)
            value = cross_ratio(a, b, x, y)
            assert cross_ratio(x, y, a, b) == pytest.approx(value, rel=1e-8)
            assert cross_ratio(b, a, x, y) == pytest.approx(1 / value, rel=1e-8)

    def test_not_collinear(self):
        with pytest.raises(NotCollinearError):
            cross_ratio([0.0, 0.0], [1.0, 0.0], [0.5, 0.2], [0.3, 0.0])

    def test_coincident_reference_points(self):
        with pytest.raises(DegenerateConfigurationError):
            cross_ratio([0.0, 0.0], [0.0, 0.0], [0.5, 0.0], [0.3, 0.0])

    def test_argument_on_reference_point(self):
        with pytest.raises(DegenerateConfigurationError):
            cross_ratio([0.0, 0.0], [1.0, 0.0], [0.0, 0.0], [0.3, 0.0])


class TestCharts:
    def test_chart_round_trip(self):
        chart = AffineChart(Homography(GENERIC))
        x = np.array([[0.1, 0.2], [-0.3, 0.05]])
        np.testing.assert_allclose(chart.lift(chart.to_chart(x)), x, atol=1e-12)

    def test_pushforward_matches_finite_difference(self):
        chart = AffineChart(Homography(GENERIC))
        x = np.array([0.1, 0.2])
        v = np.array([0.3, -0.7])
        h = 1e-6
        numeric = (chart.to_chart(x + h * v) - chart.to_chart(x - h * v)) / (2 * h)
        np.testing.assert_allclose(chart.pushforward(x, v), numeric, rtol=1e-6)

    def test_hyperplane_covector_round_trip(self):
        plane = Hyperplane.through(np.array([3.0, 4.0]), np.array([1.0, 1.0]))
        again = Hyperplane.from_covector(plane.covector)
        np.testing.assert_allclose(again.normal, [0.6, 0.8])
        assert again.offset == pytest.approx(1.4)
        assert plane.signed_distance(np.array([1.0, 1.0]))[0] == pytest.approx(0.0)

    def test_normalized_adapted_chart_sends_chord_to_unit_segment(self, disk):
        xplus = np.array([0.6, 0.8])
        xminus = np.array([-1.0, 0.0])
        chart = adapted_chart(disk, xplus, xminus, normalize=True)
        np.testing.assert_allclose(chart.to_chart(xplus), [0.0, 0.0], atol=1e-9)
        np.testing.assert_allclose(chart.to_chart(xminus), [1.0, 0.0], atol=1e-9)

    def test_adapted_chart_of_a_diameter_is_identity(self, disk):
        chart = adapted_chart(disk, np.array([1.0, 0.0]), np.array([-1.0, 0.0]))
        assert chart.is_identity

    def test_adapted_chart_preserves_distance(self, disk):
        xplus = np.array([0.6, 0.8])
        xminus = np.array([0.0, -1.0])
        chart = adapted_chart(disk, xplus, xminus, normalize=True)
        x = np.array([0.1, 0.2])
        y = np.array([-0.3, 0.4])
        reference = hilbert_distance(MetricContext(disk), x, y)
        charted = hilbert_distance(MetricContext(disk, chart), chart.to_chart(x), chart.to_chart(y))
        assert charted == pytest.approx(reference, rel=1e-8)

    def test_adapted_chart_at_a_corner(self, square):
        with pytest.raises(TangentUnavailableError):
            adapted_chart(square, np.array([1.0, 1.0]), np.array([-1.0, -1.0]))
