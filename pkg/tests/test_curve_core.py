import json

import numpy as np
import pytest

from slantchain import (
    Curve3,
    QuadratureConfig,
    SampledCurve,
    arc_length_reparametrize,
    circle,
    circular_helix,
    cumulative_integral,
    eval_derivatives,
    resample,
    sampled_to_curve,
)
from slantchain.errors import IrregularCurve, NonFiniteSample, OrderUnavailable, OutOfDomain

SQRT2 = np.sqrt(2.0)


# ---------------------------------------------------------------------------
# eval_derivatives
# ---------------------------------------------------------------------------


def test_derivatives_of_tilted_great_circle(tilted_circle):
    g = eval_derivatives(tilted_circle, 0.0, 1)
    assert np.allclose(g[0], [0.0, 0.0, 1.0], atol=1e-14)
    assert np.allclose(g[1], [-SQRT2, SQRT2, 0.0], atol=1e-14)
    assert abs(np.linalg.norm(g[1]) - 2.0) < 1e-14


def test_derivatives_of_constant_curve_fall_back_to_stencils():
    c = np.array([0.3, -1.2, 2.0])
    curve = Curve3(domain=(0.0, 1.0), position=lambda t: np.broadcast_to(c, np.shape(t) + (3,)))
    g = eval_derivatives(curve, 0.5, 2)
    assert np.allclose(g[0], c)
    assert np.allclose(g[1], 0.0, atol=1e-10)
    assert np.allclose(g[2], 0.0, atol=1e-6)


def test_derivatives_of_helix_match_symbolic(helix):
    # (0.6 cos s, 0.6 sin s, 0.8 s) at s=0: values checked by hand
    g = eval_derivatives(helix, 0.0, 2)
    assert np.allclose(g[0], [0.6, 0.0, 0.0], atol=1e-15)
    assert np.allclose(g[1], [0.0, 0.6, 0.8], atol=1e-15)
    assert np.allclose(g[2], [-0.6, 0.0, 0.0], atol=1e-15)


def test_derivative_errors():
    curve = Curve3(domain=(0.0, 1.0), position=lambda t: np.stack([t, t, t], axis=-1))
    with pytest.raises(OutOfDomain):
        eval_derivatives(curve, 2.0, 1)
    with pytest.raises(OrderUnavailable):
        eval_derivatives(curve, 0.5, 5)
    with pytest.raises(OrderUnavailable):
        # explicit step so wide the 9-node stencil cannot fit in the domain
        eval_derivatives(curve, 0.5, 4, h=0.2)


def test_finite_difference_order_is_four(helix):
    # slope of log(error) vs log(h) for the fallback stencils
    bare = Curve3(domain=helix.domain, position=helix.position)
    t = 2.0
    hs = np.array([0.2, 0.1, 0.05, 0.025])
    errs = []
    for h in hs:
        fd = bare.jet(t, 2, h=h)[2]
        exact = helix.derivative(t, 2)
        errs.append(np.linalg.norm(fd - exact))
    slope = np.polyfit(np.log(hs), np.log(errs), 1)[0]
    assert 3.5 <= slope <= 4.5


# ---------------------------------------------------------------------------
# cumulative_integral
# ---------------------------------------------------------------------------


def test_zero_integrand_gives_zero():
    F = cumulative_integral(lambda t: np.zeros_like(t), (0.0, 2.0))
    ts = np.linspace(0.0, 2.0, 17)
    assert np.allclose(F(ts), 0.0)


def test_cosine_prefix_integral():
    cfg = QuadratureConfig(rule="gauss-legendre", panels=64)
    F = cumulative_integral(lambda t: np.cos(t), (0.0, np.pi), cfg)
    assert abs(F(np.pi / 2) - 1.0) < 1e-10
    assert abs(F(0.0)) < 1e-15


def test_linear_rate_prefix_integral():
    # constant rate a*w = 0.6 * 1.25: the lift phase of the latitude circle
    F = cumulative_integral(lambda t: np.full_like(t, 0.75), (0.0, 2.0))
    assert abs(F(1.0) - 0.75) < 1e-13


def test_non_finite_sample_raises():
    def f(t):
        with np.errstate(invalid="ignore"):
            return np.sqrt(t - 0.5)

    with pytest.raises(NonFiniteSample):
        cumulative_integral(f, (0.0, 1.0))


@pytest.mark.parametrize(
    "f,exact",
    [
        (lambda t: np.cos(t), np.sin(1.0)),
        (lambda t: 5 * t**4 + t, 1.0 + 0.5),
        (lambda t: np.cos(0.75 * t), np.sin(0.75) / 0.75),
    ],
)
def test_simpson_convergence_order(f, exact):
    errs = []
    for panels in (16, 32):
        cfg = QuadratureConfig(rule="simpson", panels=panels, nodes=2)
        F = cumulative_integral(f, (0.0, 1.0), cfg)
        errs.append(abs(F(1.0) - exact))
    assert errs[0] / max(errs[1], 1e-18) >= 8.0


def test_richardson_improves_simpson():
    base = QuadratureConfig(rule="simpson", panels=16, nodes=2)
    rich = QuadratureConfig(rule="simpson", panels=16, nodes=2, richardson=True)
    exact = np.sin(1.0)
    e_base = abs(cumulative_integral(np.cos, (0.0, 1.0), base)(1.0) - exact)
    e_rich = abs(cumulative_integral(np.cos, (0.0, 1.0), rich)(1.0) - exact)
    assert e_rich < e_base / 10


def test_vector_integrand():
    F = cumulative_integral(lambda t: np.stack([np.cos(t), np.sin(t), t], axis=-1), (0.0, 1.0))
    got = F(1.0)
    assert np.allclose(got, [np.sin(1.0), 1 - np.cos(1.0), 0.5], atol=1e-12)


# ---------------------------------------------------------------------------
# arc-length reparametrization
# ---------------------------------------------------------------------------


def test_unit_speed_curve_is_fixed_point(helix):
    again = arc_length_reparametrize(helix)
    ts = np.linspace(*helix.domain, 257)
    assert np.max(np.linalg.norm(again(ts) - helix(ts), axis=1)) <= 1e-8


def test_circle_radius_two():
    fast = circle((0.0, 0.0, 0.0), 2.0, mode="planar", rate=1.0, domain=(0.0, 2 * np.pi))
    slow = arc_length_reparametrize(fast)
    length = slow.domain[1]
    assert abs(length - 4 * np.pi) < 1e-9
    ss = np.linspace(0.0, length, 257)
    assert np.max(np.abs(slow.speed(ss) - 1.0)) < 1e-8


def test_speed_two_circle_rescales(tilted_circle):
    slow = arc_length_reparametrize(tilted_circle)
    ss = np.linspace(0.0, slow.domain[1], 65)
    assert np.max(np.linalg.norm(slow(ss) - tilted_circle(ss / 2.0), axis=1)) < 1e-9


def test_reparametrization_idempotent(tilted_circle):
    once = arc_length_reparametrize(tilted_circle)
    twice = arc_length_reparametrize(once)
    ss = np.linspace(0.0, min(once.domain[1], twice.domain[1]), 129)
    assert np.max(np.linalg.norm(once(ss) - twice(ss), axis=1)) <= 1e-8


def test_reparametrized_derivatives_are_consistent(tilted_circle):
    slow = arc_length_reparametrize(tilted_circle)
    s = 0.7
    g = slow.jet(s, 2)
    assert abs(np.linalg.norm(g[1]) - 1.0) < 1e-9
    h = 1e-5
    fd = (slow(np.atleast_1d(s + h))[0] - slow(np.atleast_1d(s - h))[0]) / (2 * h)
    assert np.allclose(g[1], fd, atol=1e-8)


def test_irregular_curve_rejected():
    cusp = Curve3(domain=(-1.0, 1.0), position=lambda t: np.stack([t**2, t**3, 0 * t], axis=-1))
    with pytest.raises(IrregularCurve):
        arc_length_reparametrize(cusp)


# ---------------------------------------------------------------------------
# resample and serialization
# ---------------------------------------------------------------------------


def test_resample_endpoints(helix):
    sc = resample(helix, 2)
    assert np.allclose(sc.grid, [helix.t_min, helix.t_max])
    assert np.allclose(sc.points[0], helix(np.atleast_1d(helix.t_min))[0])


def test_resample_tilted_circle_unit_norm(tilted_circle):
    sc = resample(tilted_circle, 5)
    assert np.max(np.abs(np.linalg.norm(sc.points, axis=1) - 1.0)) < 1e-15


def test_resample_grid_spacing(helix):
    sc = resample(helix, 1024)
    expected = (helix.t_max - helix.t_min) / 1023
    assert np.allclose(np.diff(sc.grid), expected)
    with pytest.raises(ValueError):
        resample(helix, 1)


def test_json_round_trip(helix):
    sc = resample(helix, 64)
    back = SampledCurve.from_json(sc.to_json())
    assert np.array_equal(back.grid, sc.grid)
    assert np.array_equal(back.points, sc.points)


def test_csv_round_trip_preserves_doubles(helix):
    sc = resample(helix, 64)
    back = SampledCurve.from_csv(sc.to_csv())
    assert np.array_equal(back.grid, sc.grid)
    assert np.array_equal(back.points, sc.points)


def test_sampled_curve_validation():
    with pytest.raises(ValueError):
        SampledCurve(grid=np.array([0.0, 0.0, 1.0]), points=np.zeros((3, 3)))
    with pytest.raises(ValueError):
        SampledCurve(grid=np.array([0.0, 1.0]), points=np.zeros((3, 3)))


def test_sampled_to_curve_derivatives(helix):
    sc = resample(helix, 2048)
    rebuilt = sampled_to_curve(sc)
    ts = sc.grid[100:-100:97]
    exact = helix.jet(ts, 2)
    approx = rebuilt.jet(ts, 2)
    assert np.max(np.linalg.norm(exact[1] - approx[1], axis=-1)) < 1e-9
    assert np.max(np.linalg.norm(exact[2] - approx[2], axis=-1)) < 1e-6
