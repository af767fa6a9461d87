"""
Test volume growth entropy, orbit counting entropy and the exponent bounds
"""
import numpy as np
import pytest

from hilbert_lab import const
from hilbert_lab.boundary import beta_convexity, entropy_lower_bound
from hilbert_lab.entropy import (
    EntropyEstimate,
    ball_volumes,
    chi_plus_lower_bound,
    orbit_entropy,
    orbital_length_spectrum,
    ruelle_bound,
    volume_entropy,
)
from hilbert_lab.entropy.volume import _batch_labels, _planar_cells, _stratified_directions
from hilbert_lab.geometry.domain import Ellipsoid
from hilbert_lab.geometry.metric import MetricContext
from hilbert_lab.group import fit_conic, generate_domain_hull
from hilbert_lab.utils.errors import (
    InvalidParameterError,
    MonteCarloVarianceError,
    SpectrumTooSmallError,
    UnsupportedDimensionError,
)


class TestBallVolumes:
    def test_hyperbolic_disk_area(self, disk_ctx, rng):
        grid, volumes, relative = ball_volumes(disk_ctx, np.zeros(2), r_max=4.0, radii=8, samples=4000, rng=rng)
        np.testing.assert_allclose(grid, 0.5 * np.arange(1, 9))
        np.testing.assert_allclose(volumes, 2 * np.pi * (np.cosh(grid) - 1), rtol=0.03)
        assert np.all(relative < 0.05)

    def test_volumes_increase(self, quartic_ctx, rng):
        _, volumes, _ = ball_volumes(quartic_ctx, np.array([0.3, 0.1]), r_max=4.0, radii=8, samples=2000, rng=rng)
        assert np.all(np.diff(volumes) > 0)

    def test_threads_give_same_volumes(self, disk_ctx):
        single = ball_volumes(disk_ctx, np.zeros(2), 4.0, 8, 2000, np.random.default_rng(3))
        pooled = ball_volumes(disk_ctx, np.zeros(2), 4.0, 8, 2000, np.random.default_rng(3), threads=3)
        np.testing.assert_allclose(single[1], pooled[1], rtol=1e-12)

    def test_corner_cells(self):
        corners = np.array([0.25 * np.pi, 0.75 * np.pi, 1.25 * np.pi, 1.75 * np.pi])
        left, width, anchor = _planar_cells(64, corners)
        assert width.sum() == pytest.approx(2 * np.pi)
        assert np.all(width > 0)
        for corner in corners:
            i = int(np.argmin(np.abs(left - corner)))
            assert left[i] == pytest.approx(corner)
            assert anchor[i] == 1
            assert anchor[i - 1] == -1
        assert np.count_nonzero(anchor) == 8

    def test_corner_weights_are_unbiased(self, square, rng):
        directions, measure = _stratified_directions(square, np.zeros(2), 64, 400, 1e-12, rng)
        np.testing.assert_allclose(np.linalg.norm(directions, axis=2), 1.0)
        assert measure.sum(axis=0).mean() == pytest.approx(2 * np.pi, rel=0.05)

    def test_batches_cover_each_block(self, rng):
        labels = _batch_labels(20, 5, 8, rng)
        assert labels.shape == (20, 5)
        for column in labels.T:
            assert sorted(column[:8]) == list(range(8))
            assert sorted(column[8:16]) == list(range(8))
            assert len(set(column[16:])) == 4

    @pytest.mark.slow
    def test_square_volume_errors(self, square):
        _, volumes, relative = ball_volumes(MetricContext(square), np.zeros(2), 8.0, 16, 40000, np.random.default_rng(5))
        assert np.all(np.diff(volumes) > 0)
        assert np.all(relative < const.MC_MAX_RELATIVE_ERROR)


class TestVolumeEntropy:
    def test_parameter_checks(self, disk_ctx):
        with pytest.raises(InvalidParameterError):
            volume_entropy(disk_ctx, r_max=2.0)
        with pytest.raises(InvalidParameterError):
            volume_entropy(disk_ctx, radii=4)

    def test_unsupported_dimension(self):
        with pytest.raises(UnsupportedDimensionError):
            volume_entropy(MetricContext(Ellipsoid(4)))

    def test_sampling_error_rejected(self, disk_ctx, monkeypatch):
        monkeypatch.setattr(const, "MC_MAX_RELATIVE_ERROR", -1.0)
        with pytest.raises(MonteCarloVarianceError):
            volume_entropy(disk_ctx, r_max=4.0, samples=400, radii=6)

    def test_estimate_layout(self, disk_ctx):
        estimate = volume_entropy(disk_ctx, r_max=6.0, samples=3000, radii=12)
        assert estimate.method == "volume_growth"
        assert estimate.window == [3.0, 6.0]
        assert len(estimate.grid) == 12
        assert estimate.polynomial_order is None
        frame = estimate.to_frame()
        assert list(frame.columns) == ["r", "volume"]
        again = EntropyEstimate.from_dict(estimate.to_dict())
        assert again.value == estimate.value

    @pytest.mark.slow
    def test_disk(self, disk_ctx):
        estimate = volume_entropy(disk_ctx, samples=20000)
        assert estimate.value == pytest.approx(1.0, abs=0.05)

    def test_polynomial_correction(self, disk_ctx):
        estimate = volume_entropy(disk_ctx, r_max=6.0, samples=3000, radii=12, polynomial_correction=True)
        assert estimate.polynomial_order is not None

    @pytest.mark.slow
    def test_square(self, square):
        estimate = volume_entropy(MetricContext(square), polynomial_correction=True, threads=4)
        assert estimate.relative_error < const.MC_MAX_RELATIVE_ERROR
        assert estimate.value == pytest.approx(0.0, abs=0.05)

    @pytest.mark.slow
    def test_ball(self, ball3):
        estimate = volume_entropy(MetricContext(ball3), r_max=8.0, samples=30000, threads=4)
        assert estimate.value == pytest.approx(2.0, abs=0.1)


class TestOrbitEntropy:
    def test_spectrum_columns(self, rotation_group):
        spectrum = orbital_length_spectrum(rotation_group.generators, 6, rotation_group.presentation)
        assert list(spectrum.columns) == ["word", "word_length", "length", "eta"]
        assert spectrum["length"].is_monotonic_increasing
        assert (spectrum["length"] > 0).all()
        np.testing.assert_allclose(spectrum["eta"], 0.0, atol=1e-9)

    def test_spectrum_too_small(self, rotation_group):
        with pytest.raises(SpectrumTooSmallError):
            orbit_entropy(rotation_group.generators, 3, rotation_group.presentation)

    def test_reuses_given_spectrum(self, rotation_group):
        spectrum = orbital_length_spectrum(rotation_group.generators, 10, rotation_group.presentation)
        estimate = orbit_entropy(rotation_group.generators, 10, spectrum=spectrum)
        assert estimate.method == "orbit_counting"
        assert estimate.orientation == "oriented"
        assert estimate.counts == sorted(estimate.counts)
        assert estimate.counts[-1] <= len(spectrum)
        assert list(estimate.to_frame().columns) == ["T", "P_T"]

    @pytest.mark.slow
    def test_hyperbolic_surface_group(self, rotation_group):
        estimate = orbit_entropy(rotation_group.generators, 12, rotation_group.presentation, threads=4)
        assert 0.8 <= estimate.value <= 1.2

    @pytest.mark.slow
    def test_deformation_lowers_entropy(self, reflection_group, deformed_group):
        fuchsian = orbit_entropy(reflection_group.generators, 12, reflection_group.presentation, threads=4)
        deformed = orbit_entropy(deformed_group.generators, 12, deformed_group.presentation, threads=4)
        assert 0.8 <= fuchsian.value <= 1.2
        assert deformed.value < fuchsian.value - 3 * np.hypot(fuchsian.fit_stderr, deformed.fit_stderr)

    @pytest.mark.slow
    def test_orbit_and_volume_entropy_agree(self, reflection_group):
        family = reflection_group
        orbit = orbit_entropy(family.generators, 12, family.presentation, threads=4)
        hull = generate_domain_hull(family.generators, 6, family.presentation, family.base_point)
        conic = fit_conic(hull.vertices).ellipsoid()
        volume = volume_entropy(MetricContext(conic), threads=4)
        assert abs(orbit.value - volume.value) < np.hypot(orbit.fit_stderr, volume.fit_stderr)
        beta, _ = beta_convexity(conic, sample_pairs=200)
        assert orbit.value >= entropy_lower_bound(beta, 2) - 3 * orbit.fit_stderr


class TestBounds:
    def test_ruelle_bound(self):
        assert ruelle_bound(2, [0.0, 0.0]) == pytest.approx(1.0)
        assert ruelle_bound(3, [-0.1, -0.3]) == pytest.approx(1.8)

    def test_ruelle_bound_without_samples(self):
        assert ruelle_bound(3, []) == pytest.approx(2.0)

    def test_ruelle_bound_dimension(self):
        with pytest.raises(InvalidParameterError):
            ruelle_bound(1, [0.0])

    def test_chi_plus_lower_bound(self):
        assert chi_plus_lower_bound(2.0) == pytest.approx(1.0)
        assert chi_plus_lower_bound(4.0) == pytest.approx(0.5)
        with pytest.raises(InvalidParameterError):
            chi_plus_lower_bound(0.0)
