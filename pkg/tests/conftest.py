import numpy as np
import pytest

from slantchain import circle, circular_helix, constant_precession, spherical_helix

TWO_PI = 2.0 * np.pi


@pytest.fixture(scope="session")
def small_circle():
    """Latitude circle at height 0.6 with radius 0.8, two arc-length periods."""
    return circle((0.0, 0.0, 0.6), 0.8, domain=(0.0, 2.0 * TWO_PI * 0.8))


@pytest.fixture(scope="session")
def great_circle():
    return circle((0.0, 0.0, 0.0), 1.0, mode="spherical", domain=(0.0, TWO_PI))


@pytest.fixture(scope="session")
def tilted_circle():
    """Great circle in the plane x + y = 0 at parameter speed 2, starting at
    the north pole: (-sin(2t)/sqrt(2), sin(2t)/sqrt(2), cos(2t))."""
    e1 = np.array([0.0, 0.0, 1.0])
    e2 = np.array([-1.0, 1.0, 0.0]) / np.sqrt(2.0)
    return circle((0.0, 0.0, 0.0), 1.0, mode="spherical", basis=(e1, e2), rate=2.0,
                  domain=(0.0, np.pi))


@pytest.fixture(scope="session")
def unit_circle_planar():
    return circle((0.0, 0.0, 0.0), 1.0, mode="planar", domain=(0.0, TWO_PI))


@pytest.fixture(scope="session")
def helix():
    """Unit-speed circular helix with radius 0.6 and pitch parameter 0.8."""
    return circular_helix(0.6, 0.8, 1.0, domain=(0.0, TWO_PI))


@pytest.fixture(scope="session")
def precession():
    return constant_precession(0.6, 0.8, 1.0, domain=(0.0, TWO_PI))


@pytest.fixture(scope="session")
def sph_helix():
    return spherical_helix(0.6, 0.8, 0.0, domain=(0.0, 2.0 * TWO_PI * 0.8))
