"""
Shared domains, contexts and groups for the laboratory tests
"""
import numpy as np
import pytest

from hilbert_lab.geometry.domain import Ellipsoid, Lens, PBall, Polytope
from hilbert_lab.geometry.metric import MetricContext
from hilbert_lab.group import triangle_reflection_family, triangle_rotation_group


@pytest.fixture(scope="module")
def disk():
    return Ellipsoid(2)


@pytest.fixture(scope="module")
def ball3():
    return Ellipsoid(3)


@pytest.fixture(scope="module")
def square():
    return Polytope(np.array([[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]]))


@pytest.fixture(scope="module")
def quartic():
    """Unit ball of the 4-norm in the plane."""
    return PBall(2, 4.0)


@pytest.fixture(scope="module")
def lens():
    return Lens(a=0.25, c=1.0, length=2.0)


@pytest.fixture(scope="module")
def disk_ctx(disk):
    return MetricContext(disk)


@pytest.fixture(scope="module")
def quartic_ctx(quartic):
    return MetricContext(quartic)


@pytest.fixture(scope="module")
def rotation_group():
    return triangle_rotation_group(3, 3, 4)


@pytest.fixture(scope="module")
def reflection_group():
    return triangle_reflection_family(3, 3, 4)


@pytest.fixture(scope="module")
def deformed_group():
    return triangle_reflection_family(3, 3, 4, s=2.0)


@pytest.fixture
def rng():
    return np.random.default_rng(7)
