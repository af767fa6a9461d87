"""
Test domain oracles and the domain factory
"""
import numpy as np
import pytest

from hilbert_lab.geometry.domain import (
    BoundaryCurve,
    Ellipsoid,
    HullDomain,
    Lens,
    PBall,
    Polytope,
    TransformedDomain,
    make_domain,
)
from hilbert_lab.geometry.projective import Homography
from hilbert_lab.utils.errors import (
    InvalidParameterError,
    InvalidSpecError,
    NonSmoothPointError,
    NotInteriorError,
    NotOnBoundaryError,
)


@pytest.fixture(scope="module")
def ellipse():
    return Ellipsoid(2, matrix=np.diag([1.0, 4.0]), center=np.array([0.5, -0.25]))


@pytest.fixture(scope="module")
def egg():
    theta = 2 * np.pi * np.arange(32) / 32
    return BoundaryCurve(1.0 + 0.1 * np.cos(theta))


@pytest.mark.parametrize(
    "domain",
    [
        Ellipsoid(2),
        Ellipsoid(3),
        PBall(2, 4.0),
        PBall(3, 1.5),
        Lens(),
        Polytope(np.array([[0.0, 0.0], [2.0, 0.0], [0.0, 1.0]])),
    ],
    ids=lambda d: repr(d),
)
def test_ray_exit_lands_on_boundary(domain, rng):
    dirs = rng.normal(size=(20, domain.dimension))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    hits = domain.center + domain.ray_exit(domain.center, dirs)[:, None] * dirs
    np.testing.assert_allclose(domain.implicit(hits), 0.0, atol=1e-9)


def test_ellipse_chord(ellipse):
    chord = ellipse.chord(ellipse.center, np.array([0.0, 3.0]))
    assert chord.a == pytest.approx(0.5)
    assert chord.b == pytest.approx(0.5)
    assert chord.length == pytest.approx(1.0)
    np.testing.assert_allclose(chord.xplus, [0.5, 0.25])
    np.testing.assert_allclose(chord.reversed().xplus, [0.5, -0.75])


def test_chord_requires_interior(disk):
    with pytest.raises(NotInteriorError):
        disk.chord(np.array([2.0, 0.0]), np.array([1.0, 0.0]))


def test_zero_direction_rejected(disk):
    with pytest.raises(InvalidParameterError):
        disk.chord(np.zeros(2), np.zeros(2))


def test_disk_tangent_normal(disk):
    p = np.array([0.6, 0.8])
    tangent = disk.boundary_tangent(p)
    np.testing.assert_allclose(tangent.normal, p)
    assert tangent.offset == pytest.approx(1.0)


def test_tangent_off_boundary(disk):
    with pytest.raises(NotOnBoundaryError):
        disk.boundary_tangent(np.array([0.5, 0.0]))


class TestPolytope:
    def test_facet_tangent(self, square):
        tangent = square.boundary_tangent(np.array([1.0, 0.3]))
        np.testing.assert_allclose(tangent.normal, [1.0, 0.0], atol=1e-12)

    def test_vertex_is_not_smooth(self, square):
        with pytest.raises(NonSmoothPointError):
            square.boundary_tangent(np.array([1.0, 1.0]))

    def test_not_strictly_convex(self, square):
        assert not square.strictly_convex
        assert not square.supports_flow

    def test_vertices_in_convex_position(self):
        with pytest.raises(InvalidSpecError):
            Polytope(np.array([[0.0, 0.0], [2.0, 0.0], [0.0, 2.0], [0.5, 0.5]]))

    def test_flat_vertex_set(self):
        with pytest.raises(InvalidSpecError):
            Polytope(np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]))

    def test_hull_domain_center(self):
        points = np.array([[-1.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.0, -1.0], [0.1, 0.1]])
        hull = HullDomain(points)
        assert hull.contains(hull.center)


def test_pball_tangent_at_axis(quartic):
    np.testing.assert_allclose(quartic.boundary_tangent(np.array([1.0, 0.0])).normal, [1.0, 0.0])


def test_pball_needs_p_above_one():
    with pytest.raises(InvalidSpecError):
        PBall(2, 1.0)


def test_lens_endpoints(lens):
    left, right = lens.endpoints
    np.testing.assert_allclose(lens.boundary_tangent(left).normal, [-1.0, 0.0])
    np.testing.assert_allclose(lens.boundary_tangent(right).normal, [1.0, 0.0])
    assert lens.contains(np.array([1.0, 0.5]))
    assert not lens.contains(np.array([0.001, 0.5]))


def test_boundary_curve_radius(egg):
    assert egg.ray_exit(egg.center, np.array([1.0, 0.0])) == pytest.approx(1.1, rel=1e-6)
    assert egg.ray_exit(egg.center, np.array([-1.0, 0.0])) == pytest.approx(0.9, rel=1e-6)


def test_nonconvex_curve_rejected():
    theta = 2 * np.pi * np.arange(32) / 32
    with pytest.raises(InvalidSpecError):
        BoundaryCurve(1.0 + 0.6 * np.cos(3 * theta))


def test_transformed_domain_matches_base(disk):
    g = Homography(np.array([[1.0, 0.2, 0.0], [0.0, 1.0, 0.1], [0.1, 0.0, 1.2]]))
    image = TransformedDomain(disk, g)
    x = np.array([0.2, -0.3])
    inside = image.contains(g.apply_affine(x)[0])
    assert inside == disk.contains(x)
    outside = g.apply_affine(np.array([0.9, 0.9]))[0]
    assert not image.contains(outside)


def test_unbounded_image_rejected(disk):
    # Sends the line x = -1/2 through the disk to infinity.
    g = Homography(np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [2.0, 0.0, 1.0]]))
    with pytest.raises(InvalidSpecError):
        TransformedDomain(disk, g)


def test_sample_interior(disk, rng):
    points = disk.sample_interior(rng, 200)
    assert points.shape == (200, 2)
    assert np.all(disk.contains_many(points))


class TestFactory:
    @pytest.mark.parametrize(
        "spec,kind",
        [
            ({"kind": "ellipsoid", "n": 3}, "ellipsoid"),
            ({"kind": "polytope", "vertices": [[0, 0], [1, 0], [0, 1]]}, "polytope"),
            ({"kind": "p_ball", "n": 2, "p": 3}, "p_ball"),
            ({"kind": "lens", "a": 0.3}, "lens"),
            ({"kind": "hull", "points": [[-1, -1], [1, -1], [0, 1], [0, 0.2]]}, "hull"),
            (
                {"kind": "transformed", "base": {"kind": "ellipsoid", "n": 2}, "matrix": np.eye(3).tolist()},
                "transformed",
            ),
        ],
    )
    def test_kinds(self, spec, kind):
        assert make_domain(spec).kind == kind

    def test_unknown_kind(self):
        with pytest.raises(InvalidSpecError):
            make_domain({"kind": "torus"})

    def test_missing_exponent(self):
        with pytest.raises(InvalidSpecError):
            make_domain({"kind": "p_ball", "n": 2})

    def test_center_dimension_mismatch(self):
        with pytest.raises(InvalidSpecError):
            make_domain({"kind": "ellipsoid", "n": 2, "center": [0.0, 0.0, 0.0]})
