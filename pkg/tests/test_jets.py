import numpy as np
from hypothesis import given, settings, strategies as st

from slantchain import jets

ORDER = 5


def _poly_jet(coeffs, t):
    """Exact jet of a polynomial at t (derivative array)."""
    c = np.array(coeffs, dtype=float)
    out = []
    for _ in range(ORDER + 1):
        out.append(np.polyval(c[::-1], t))
        c = c[1:] * np.arange(1, len(c))
    return np.array(out)


coeff = st.floats(min_value=-2.0, max_value=2.0, allow_nan=False)


@given(st.lists(coeff, min_size=2, max_size=5), st.lists(coeff, min_size=2, max_size=5),
       st.floats(min_value=-1.0, max_value=1.0))
@settings(max_examples=100, deadline=None)
def test_jmul_matches_polynomial_product(a, b, t):
    prod = np.polynomial.polynomial.polymul(a, b)
    expected = _poly_jet(prod, t)
    got = jets.jmul(_poly_jet(a, t), _poly_jet(b, t))
    assert np.allclose(got, expected[: len(got)], atol=1e-9)


@given(st.lists(coeff, min_size=1, max_size=4), st.floats(min_value=-1.0, max_value=1.0))
@settings(max_examples=100, deadline=None)
def test_jrecip_inverts(a, t):
    ja = _poly_jet(a, t)
    ja[0] = abs(ja[0]) + 1.0  # keep the value away from zero
    recip = jets.jrecip(ja)
    one = jets.jmul(ja, recip)
    expected = np.zeros(len(one))
    expected[0] = 1.0
    assert np.allclose(one, expected, atol=1e-9)


@given(st.lists(coeff, min_size=1, max_size=4), st.floats(min_value=-1.0, max_value=1.0))
@settings(max_examples=100, deadline=None)
def test_jsqrt_squares_back(a, t):
    ja = _poly_jet(a, t)
    ja[0] = abs(ja[0]) + 1.0  # keep the value positive
    root = jets.jsqrt(ja)
    assert np.allclose(jets.jmul(root, root), ja, atol=1e-9)


def test_jsincos_against_closed_form():
    # theta(t) = 2t + 0.3 at t=0.4: all derivatives of sin/cos known
    t = 0.4
    theta = np.array([2 * t + 0.3, 2.0, 0.0, 0.0, 0.0])
    s, c = jets.jsincos(theta)
    val = 2 * t + 0.3
    expect_s = [np.sin(val), 2 * np.cos(val), -4 * np.sin(val), -8 * np.cos(val), 16 * np.sin(val)]
    expect_c = [np.cos(val), -2 * np.sin(val), -4 * np.cos(val), 8 * np.sin(val), 16 * np.cos(val)]
    assert np.allclose(s, expect_s, atol=1e-12)
    assert np.allclose(c, expect_c, atol=1e-12)


def test_vector_ops_against_helix():
    # u(t) = (cos t, sin t, t), v(t) = (t^2, 1, -t) with hand derivatives
    t = 0.7
    u = np.array([
        [np.cos(t), np.sin(t), t],
        [-np.sin(t), np.cos(t), 1.0],
        [-np.cos(t), -np.sin(t), 0.0],
        [np.sin(t), -np.cos(t), 0.0],
    ])
    v = np.array([
        [t * t, 1.0, -t],
        [2 * t, 0.0, -1.0],
        [2.0, 0.0, 0.0],
        [0.0, 0.0, 0.0],
    ])
    h = 1e-5

    def u_at(x):
        return np.array([np.cos(x), np.sin(x), x])

    def v_at(x):
        return np.array([x * x, 1.0, -x])

    dot = jets.jdot(u, v)
    fd = (u_at(t + h) @ v_at(t + h) - u_at(t - h) @ v_at(t - h)) / (2 * h)
    assert abs(dot[1] - fd) < 1e-9
    cross = jets.jcross(u, v)
    fd_cross = (np.cross(u_at(t + h), v_at(t + h)) - np.cross(u_at(t - h), v_at(t - h))) / (2 * h)
    assert np.allclose(cross[1], fd_cross, atol=1e-9)
    det = jets.jdet3(u, v, u + v)
    assert np.allclose(det[0], np.dot(np.cross(u[0], v[0]), u[0] + v[0]), atol=1e-12)


def test_junit_produces_unit_jets():
    t = 0.3
    u = np.array([
        [np.cos(t), np.sin(t), 2 * t],
        [-np.sin(t), np.cos(t), 2.0],
        [-np.cos(t), -np.sin(t), 0.0],
    ])
    n = jets.junit(u)
    norm2 = jets.jdot(n, n)
    assert abs(norm2[0] - 1.0) < 1e-12
    assert abs(norm2[1]) < 1e-12  # derivative of a constant norm vanishes
    assert abs(norm2[2]) < 1e-12


def test_jsign_abs():
    a = np.array([-2.0, 3.0, -1.0])
    assert np.allclose(jets.jsign_abs(a), [2.0, -3.0, 1.0])
