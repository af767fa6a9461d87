"""
Test chord-end shape exponents and boundary convexity
"""
import numpy as np
import pandas as pd
import pytest

from hilbert_lab.boundary import (
    ShapeExponent,
    beta_convexity,
    beta_from_exponents,
    entropy_lower_bound,
    local_convexity_exponents,
    shape_exponent,
)
from hilbert_lab.utils.errors import (
    InsufficientSamplesError,
    InvalidBetaError,
    InvalidParameterError,
    ScaleUnderflowError,
    TangentUnavailableError,
)


class TestShapeExponent:
    def test_round_boundary(self, disk):
        result = shape_exponent(disk, np.array([1.0, 0.0]))
        assert result.exponent == pytest.approx(0.5, abs=0.01)
        assert result.eta == pytest.approx(0.0, abs=0.02)
        assert len(result.scales) == 21

    def test_flat_point_of_quartic(self, quartic):
        result = shape_exponent(quartic, np.array([1.0, 0.0]))
        assert result.exponent == pytest.approx(0.25, abs=0.01)
        assert result.eta == pytest.approx(-0.5, abs=0.02)

    def test_lens_ends_are_complementary(self, lens):
        left, right = lens.endpoints
        at_left = shape_exponent(lens, left, xminus=right)
        at_right = shape_exponent(lens, right, xminus=left)
        assert at_left.exponent == pytest.approx(lens.a, abs=0.01)
        assert at_right.exponent == pytest.approx(1 - lens.a, abs=0.01)
        assert at_left.eta + at_right.eta == pytest.approx(0.0, abs=0.03)

    def test_given_scales_are_all_fitted(self, disk):
        scales = [1e-3, 1e-4, 1e-5, 1e-6]
        result = shape_exponent(disk, np.array([0.0, -1.0]), v=np.array([1.0, 0.0]), scales=scales)
        assert result.scales == scales
        assert result.exponent == pytest.approx(0.5, abs=0.01)
        frame = result.to_frame()
        assert list(frame.columns) == ["scale", "y_plus", "y_minus"]
        assert (frame["y_plus"] > 0).all()

    def test_serializable(self, disk):
        result = shape_exponent(disk, np.array([1.0, 0.0]), scales=[1e-3, 1e-4, 1e-5])
        assert ShapeExponent.from_dict(result.to_dict()).exponent == result.exponent

    @pytest.mark.parametrize("scales", [[1e-12, 1e-4, 1e-3], [1e-3, 1e-2, 1.0]])
    def test_scale_range(self, disk, scales):
        with pytest.raises(ScaleUnderflowError):
            shape_exponent(disk, np.array([1.0, 0.0]), scales=scales)

    def test_too_few_scales(self, disk):
        with pytest.raises(InsufficientSamplesError):
            shape_exponent(disk, np.array([1.0, 0.0]), scales=[1e-3, 1e-4])

    def test_corner(self, square):
        with pytest.raises(TangentUnavailableError):
            shape_exponent(square, np.array([1.0, 1.0]))


class TestConvexity:
    def test_local_exponents_on_disk(self, disk):
        table = local_convexity_exponents(disk, sample_pairs=100)
        assert list(table.columns) == ["x1", "x2", "exponent", "pairs"]
        assert len(table) == 8
        np.testing.assert_allclose(table["exponent"], 2.0, atol=0.05)
        np.testing.assert_allclose(np.hypot(table["x1"], table["x2"]), 1.0, atol=1e-9)

    @pytest.mark.parametrize("kwargs", [{"sample_pairs": 0}, {"max_separation": 0.0}, {"max_separation": 1.5}])
    def test_invalid_parameters(self, disk, kwargs):
        with pytest.raises(InvalidParameterError):
            local_convexity_exponents(disk, **kwargs)

    def test_disk(self, disk):
        beta, alpha = beta_convexity(disk, sample_pairs=200)
        assert beta == pytest.approx(2.0, abs=0.05)
        assert alpha == pytest.approx(2.0, abs=0.1)

    def test_quartic(self, quartic):
        beta, alpha = beta_convexity(quartic, sample_pairs=200)
        assert beta == pytest.approx(4.0, abs=0.1)
        assert 1 / alpha + 1 / beta == pytest.approx(1.0)

    def test_beta_from_table(self, quartic):
        table = local_convexity_exponents(quartic, sample_pairs=200)
        assert beta_from_exponents(table)[0] == table["exponent"].max()
        assert table["exponent"].min() == pytest.approx(2.0, abs=0.1)

    @pytest.mark.parametrize("exponent", [1.0, 0.8, np.nan])
    def test_beta_without_conjugate(self, exponent):
        table = pd.DataFrame({"exponent": [exponent], "pairs": [10]})
        with pytest.raises(InvalidParameterError):
            beta_from_exponents(table)

    def test_corner(self, square):
        with pytest.raises(TangentUnavailableError):
            beta_convexity(square)


class TestEntropyLowerBound:
    @pytest.mark.parametrize("beta,n,expected", [(2.0, 2, 1.0), (4.0, 2, 0.5), (4.0, 3, 1.0), (1.97, 2, 1.0)])
    def test_bound(self, beta, n, expected):
        assert entropy_lower_bound(beta, n) == pytest.approx(expected)

    def test_beta_below_two(self):
        with pytest.raises(InvalidBetaError):
            entropy_lower_bound(1.5, 2)

    def test_dimension(self):
        with pytest.raises(InvalidParameterError):
            entropy_lower_bound(2.0, 1)
