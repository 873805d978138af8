"""Closed-form reference curves and the Bessel stack.

These are the oracles the constructive operators are tested against: circles
on the sphere and in the plane, the explicit spherical helix, the circular
helix, the constant-precession curve, and the truncated Bessel triple series
for the third-level space chain. Every curve here carries analytic
derivatives to any order.

The Bessel series below follows the standard ascending-series convention and
the sine expansion carries the sign that makes it numerically equal to
sin(x cos phi); the companion cosine expansion is the classical one. The
triple series for the depth-3 chain uses the coefficient and index
conventions fixed numerically against the operator chain, which is the
arbiter whenever conventions collide.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curve_core import Curve3
from .errors import BadParams, RangeExceeded, ResonantParameters

__all__ = [
    "GalleryParams",
    "BesselTruncation",
    "circle",
    "spherical_helix",
    "circular_helix",
    "constant_precession",
    "bessel_j",
    "cos_expansion",
    "sin_expansion",
    "j3_partial_series",
    "j3_curve",
    "j3_truncation",
]


@dataclass(frozen=True)
class GalleryParams:
    """Parameters of the closed-form families.

    For spherical circles `a` is the axis offset with a^2 + r^2 = 1; for the
    Euclidean families `a`, `b` are the helix radius and pitch parameters
    with r = sqrt(a^2 + b^2) and w = 1/r for unit speed.
    """

    a: float
    r: float | None = None
    w: float | None = None
    b: float | None = None
    epsilon: int = 1
    theta0: float = 0.0

    def spherical(self) -> "GalleryParams":
        if self.r is None:
            raise BadParams("spherical parameters need a radius r")
        if abs(self.a**2 + self.r**2 - 1.0) > 1e-12:
            raise BadParams(f"a^2 + r^2 = {self.a**2 + self.r**2} must equal 1")
        return self

    def euclidean(self) -> "GalleryParams":
        if self.b is None:
            raise BadParams("euclidean parameters need a pitch b")
        r = math.hypot(self.a, self.b)
        w = self.w if self.w is not None else 1.0 / r
        if abs(w * r - 1.0) > 1e-12:
            raise BadParams(f"w = {w} is not 1/sqrt(a^2+b^2); the curve would not be unit speed")
        return GalleryParams(a=self.a, r=r, w=w, b=self.b, epsilon=self.epsilon, theta0=self.theta0)


@dataclass(frozen=True)
class BesselTruncation:
    """Truncation order of a Bessel series and an estimated remainder."""

    K: int
    tail_bound: float


# ---------------------------------------------------------------------------
# trigonometric closed forms
# ---------------------------------------------------------------------------


class _TrigCurve:
    """const + linear*t + sum of amp*sin(freq*t + phase), differentiable to any order."""

    def __init__(self, terms, const=(0.0, 0.0, 0.0), linear=(0.0, 0.0, 0.0)):
        self.amps = np.array([t[0] for t in terms], dtype=float).reshape(-1, 3)
        self.freqs = np.array([t[1] for t in terms], dtype=float)
        self.phases = np.array([t[2] for t in terms], dtype=float)
        self.const = np.asarray(const, dtype=float)
        self.linear = np.asarray(linear, dtype=float)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        args = np.multiply.outer(t, self.freqs) + self.phases
        out = np.sin(args) @ self.amps
        return out + self.const + np.multiply.outer(t, self.linear)

    def derivative(self, t, order):
        t = np.asarray(t, dtype=float)
        args = np.multiply.outer(t, self.freqs) + self.phases + order * (np.pi / 2.0)
        scaled = self.amps * self.freqs[:, None] ** order
        out = np.sin(args) @ scaled
        if order == 1:
            out = out + self.linear
        return out

    def to_curve(self, domain, meta=None, mask=()):
        return Curve3(
            domain=(float(domain[0]), float(domain[1])),
            position=self,
            derivative=self.derivative,
            max_order=64,
            regularity_mask=tuple(mask),
            meta=dict(meta or {}),
        )


def _orthonormal_basis(axis):
    """Right-handed (e1, e2, n) with n along axis; deterministic choice."""
    n = np.asarray(axis, dtype=float)
    norm = np.linalg.norm(n)
    if norm < 1e-14:
        return np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0]), np.array([0.0, 0.0, 1.0])
    n = n / norm
    helper = np.array([0.0, 0.0, 1.0]) if abs(n[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
    e1 = np.cross(helper, n)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(n, e1)
    return e1, e2, n


def circle(a_vec, r, *, mode="auto", phase=0.0, rate=None, basis=None, domain=None) -> Curve3:
    """Circle of radius r, spherical (center offset a_vec on the unit sphere)
    or planar (center a_vec, plane normal to z unless a basis is given).

    In spherical mode `|a_vec|^2 + r^2 = 1` is required, and the default
    parametrization is unit speed (angular rate 1/r). `rate` overrides the
    angular rate (e.g. a non-unit-speed parametrization); `basis=(e1, e2)`
    pins the circle's plane.
    """
    a_vec = np.asarray(a_vec, dtype=float)
    if r <= 0:
        raise BadParams("radius must be positive")
    a = float(np.linalg.norm(a_vec))
    on_sphere = abs(a * a + r * r - 1.0) <= 1e-9
    if mode == "auto":
        mode = "spherical" if on_sphere else "planar"
    if mode == "spherical" and not on_sphere:
        raise BadParams(f"spherical circle needs |a|^2 + r^2 = 1, got {a*a + r*r}")
    if mode not in ("spherical", "planar"):
        raise BadParams(f"unknown circle mode {mode!r}")

    if basis is not None:
        e1 = np.asarray(basis[0], dtype=float)
        e2 = np.asarray(basis[1], dtype=float)
    elif mode == "spherical" and a > 0 and (abs(a_vec[0]) > 1e-14 or abs(a_vec[1]) > 1e-14):
        e1, e2, _ = _orthonormal_basis(a_vec)
    else:
        e1, e2 = np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0])

    w = 1.0 / r
    rate = w if rate is None else float(rate)
    curve = _TrigCurve(
        terms=[(r * e1, rate, phase + np.pi / 2.0), (r * e2, rate, phase)],
        const=a_vec,
    )
    if domain is None:
        domain = (0.0, 2.0 * np.pi / rate)
    meta = {
        "family": "circle",
        "mode": mode,
        "a": a,
        "r": float(r),
        "w": w,
        "rate": rate,
        "phase": float(phase),
        "param": "s" if abs(rate * r - 1.0) < 1e-12 else "t",
    }
    return curve.to_curve(domain, meta)


def spherical_helix(a, r, theta0=0.0, *, domain=None) -> Curve3:
    """The explicit spherical helix with axis (0, 0, 1).

    This is the closed form obtained by applying the spherical lift to the
    latitude circle of radius r at height a, with lift phase theta0. The
    parametrization inherits the circle's arc length, so the speed is
    |cos(a w s + theta0)| and the curve has cusps where that factor vanishes.
    """
    GalleryParams(a=a, r=r).spherical()
    if not (0.0 < a < 1.0):
        raise BadParams("spherical helix needs 0 < a < 1 (denominators w(a+-1))")
    w = 1.0 / r
    wp, wm = w * (a + 1.0), w * (a - 1.0)
    terms = [
        (np.array([r / (2 * wp), 0.0, 0.0]), wp, theta0),
        (np.array([r / (2 * wm), 0.0, 0.0]), wm, theta0),
        (np.array([0.0, -r / (2 * wp), 0.0]), wp, theta0 + np.pi / 2.0),
        (np.array([0.0, r / (2 * wm), 0.0]), wm, theta0 + np.pi / 2.0),
        (np.array([0.0, 0.0, r]), a * w, theta0),
    ]
    if domain is None:
        domain = (0.0, 2.0 * np.pi / w)
    curve = _TrigCurve(terms)
    cusps = _cosine_zeros(a * w, theta0, domain)
    mask = _mask_from_cusps(domain, cusps, half_width=1e-8 / (a * w))
    return curve.to_curve(
        domain,
        meta={
            "family": "spherical-helix",
            "a": float(a),
            "r": float(r),
            "w": w,
            "theta0": float(theta0),
            "cusps": [float(c) for c in cusps],
            "param": "s",
        },
        mask=mask,
    )


def _cosine_zeros(freq, phase, domain):
    """Solutions of cos(freq*s + phase) = 0 inside the domain."""
    lo, hi = domain
    k_lo = math.floor((freq * lo + phase - np.pi / 2.0) / np.pi)
    k_hi = math.ceil((freq * hi + phase - np.pi / 2.0) / np.pi)
    zeros = [(np.pi / 2.0 + k * np.pi - phase) / freq for k in range(k_lo, k_hi + 1)]
    return [z for z in zeros if lo < z < hi]


def _mask_from_cusps(domain, cusps, half_width):
    lo, hi = domain
    points = [lo] + sorted(cusps) + [hi]
    mask = []
    for left, right in zip(points[:-1], points[1:]):
        a = left if left == lo else left + half_width
        b = right if right == hi else right - half_width
        if b > a:
            mask.append((a, b))
    return tuple(mask)


def circular_helix(a, b, w=None, *, domain=None) -> Curve3:
    """Circular helix (a cos ws, a sin ws, b w s); unit speed when w = 1/sqrt(a^2+b^2)."""
    if a <= 0 or b == 0:
        raise BadParams("circular helix needs a > 0 and b != 0")
    p = GalleryParams(a=a, b=b, w=w).euclidean()
    w = p.w
    curve = _TrigCurve(
        terms=[(np.array([a, 0.0, 0.0]), w, np.pi / 2.0), (np.array([0.0, a, 0.0]), w, 0.0)],
        linear=(0.0, 0.0, b * w),
    )
    if domain is None:
        domain = (0.0, 4.0 * np.pi / w)
    return curve.to_curve(
        domain,
        meta={"family": "circular-helix", "a": float(a), "b": float(b), "w": w, "param": "s"},
    )


def constant_precession(a, b, w=None, epsilon=1, *, domain=None) -> Curve3:
    """Constant-precession curve: curvature R cos(Omega s), torsion R sin(Omega s)
    with R = a w^2 and Omega = b w^2; lies on a one-sheeted hyperboloid."""
    if a <= 0 or b == 0:
        raise BadParams("constant precession needs a > 0 and b != 0 (z-component divides by b w)")
    if epsilon not in (1, -1):
        raise BadParams("epsilon must be +1 or -1")
    p = GalleryParams(a=a, b=b, w=w, epsilon=epsilon).euclidean()
    w = p.w
    bw = b * w
    if min(abs(1.0 + bw), abs(1.0 - bw)) < 1e-9:
        raise BadParams("resonant pitch: |1 +- b w| too small")
    c = epsilon * a * a * w / 2.0
    terms = [
        (np.array([c / (1 + bw) ** 2, 0.0, 0.0]), w * (1 + bw), 0.0),
        (np.array([c / (1 - bw) ** 2, 0.0, 0.0]), w * (1 - bw), 0.0),
        (np.array([0.0, -c / (1 + bw) ** 2, 0.0]), w * (1 + bw), np.pi / 2.0),
        (np.array([0.0, -c / (1 - bw) ** 2, 0.0]), w * (1 - bw), np.pi / 2.0),
        (np.array([0.0, 0.0, -epsilon * a / bw]), b * w * w, np.pi / 2.0),
    ]
    curve = _TrigCurve(terms)
    if domain is None:
        domain = (0.0, 2.0 * np.pi / (b * w * w))
    return curve.to_curve(
        domain,
        meta={
            "family": "constant-precession",
            "a": float(a),
            "b": float(b),
            "w": w,
            "epsilon": int(epsilon),
            "param": "s",
        },
    )


# ---------------------------------------------------------------------------
# Bessel stack
# ---------------------------------------------------------------------------

_BESSEL_X_MAX = 30.0
_BESSEL_N_MAX = 64


def _bessel_series(n: int, x: float) -> float:
    if x == 0.0:
        return 1.0 if n == 0 else 0.0
    half = 0.5 * x
    # leading term (x/2)^n / n! via logs to stay inside float range for n <= 64
    term = math.exp(n * math.log(abs(half)) - math.lgamma(n + 1))
    if half < 0 and n % 2:
        term = -term
    total = term
    q = half * half
    for k in range(1, 400):
        term *= -q / (k * (n + k))
        total += term
        if abs(term) <= 1e-18 * max(1.0, abs(total)):
            break
    return total


def _bessel_integral(n: int, x: float) -> float:
    # (1/pi) * integral over [0, pi] of cos(n*phi - x*sin(phi))
    oscillations = n + abs(x)
    nodes, weights = np.polynomial.legendre.leggauss(64)
    panels = max(4, int(oscillations // 4) + 4)
    edges = np.linspace(0.0, np.pi, panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    phi = mid[:, None] + half[:, None] * nodes
    vals = np.cos(n * phi - x * np.sin(phi))
    return float(np.sum((vals @ weights) * half) / np.pi)


def bessel_j(n: int, x: float, *, method: str = "auto") -> float:
    """Bessel function of the first kind, integer order.

    Two independent routes are provided: the standard ascending series and
    composite Gauss-Legendre quadrature of the cosine integral form. `auto`
    picks the series for small arguments, where it is accurate to machine
    precision, and the integral beyond.
    """
    if n < 0 or n > _BESSEL_N_MAX:
        raise RangeExceeded(f"order must be in [0, {_BESSEL_N_MAX}]")
    x = float(x)
    if abs(x) > _BESSEL_X_MAX:
        raise RangeExceeded(f"|x| <= {_BESSEL_X_MAX} required")
    if method == "auto":
        method = "series" if abs(x) <= 10.0 else "integral"
    if method == "series":
        return _bessel_series(n, x)
    if method == "integral":
        if x < 0:
            return ((-1.0) ** n) * _bessel_integral(n, -x)
        return _bessel_integral(n, x)
    raise ValueError(f"unknown method {method!r}")


def cos_expansion(x: float, phi, terms: int = 30):
    """Truncated even-harmonic expansion of cos(x cos phi)."""
    phi = np.asarray(phi, dtype=float)
    out = np.full_like(phi, bessel_j(0, x), dtype=float)
    for k in range(1, terms + 1):
        out = out + 2.0 * ((-1.0) ** k) * bessel_j(2 * k, x) * np.cos(2 * k * phi)
    return out if out.shape else float(out)


def sin_expansion(x: float, phi, terms: int = 30):
    """Truncated odd-harmonic expansion of sin(x cos phi).

    The sign convention is fixed numerically: with (-1)^(k+1) the truncation
    converges to sin(x cos phi) under the standard Bessel definition.
    """
    phi = np.asarray(phi, dtype=float)
    out = np.zeros_like(phi, dtype=float)
    for k in range(1, terms + 1):
        out = out + 2.0 * ((-1.0) ** (k + 1)) * bessel_j(2 * k - 1, x) * np.cos((2 * k - 1) * phi)
    return out if out.shape else float(out)


# ---------------------------------------------------------------------------
# depth-3 chain as a truncated triple series
# ---------------------------------------------------------------------------

_RESONANCE_DELTA = 1e-3


def _j3_xy_groups(a, b, w, K):
    """(coefficient, lambda) pairs shared by the x and y series."""
    x_ab = a / b
    ap, am, a0 = 1.0 / (1.0 + b * w), 1.0 / (1.0 - b * w), 2.0 / (a * a * w * w)
    j0 = bessel_j(0, x_ab)
    groups = [(j0 * ap, 1.0 + 2 * b * w), (j0 * am, 1.0 - 2 * b * w), (j0 * a0, 1.0)]
    for k in range(1, K + 1):
        ck = ((-1.0) ** k) * bessel_j(2 * k, x_ab)
        groups += [
            (ck * ap, 1.0 + 2 * b * w * (k + 1)),
            (ck * ap, 1.0 - 2 * b * w * (k - 1)),
            (ck * am, 1.0 + 2 * b * w * (k - 1)),
            (ck * am, 1.0 - 2 * b * w * (k + 1)),
            (ck * a0, 1.0 + 2 * k * b * w),
            (ck * a0, 1.0 - 2 * k * b * w),
        ]
    return groups


def _j3_check_resonance(a, b, w, K):
    bad = []
    if abs(1.0 + b * w) < _RESONANCE_DELTA or abs(1.0 - b * w) < _RESONANCE_DELTA:
        bad.append("1 +- b w")
    if abs(b * w * w) < _RESONANCE_DELTA:
        bad.append("b w^2")
    for _, lam in _j3_xy_groups(a, b, w, K):
        if abs(lam) < _RESONANCE_DELTA:
            bad.append(f"lambda={lam:.3e}")
    if bad:
        raise ResonantParameters("denominators too close to zero: " + ", ".join(sorted(set(bad))))


def j3_curve(params: GalleryParams, terms: int = 30, *, domain=(0.0, 1.0)) -> Curve3:
    """The depth-3 space chain from a circle seed as a truncated series curve.

    The x and y components are harmonic sums over the even-order Bessel
    coefficients; z carries a secular (linear) drift plus harmonics from both
    parities. Differentiable to any order like every gallery closed form.
    """
    p = params.euclidean()
    a, b, w, eps = p.a, p.b, p.w, p.epsilon
    _j3_check_resonance(a, b, w, terms)
    x_ab = a / b
    c2 = eps * a**3 * w * w / 4.0

    trig_terms = []
    for coef, lam in _j3_xy_groups(a, b, w, terms):
        amp = -c2 * coef / (lam * lam)
        trig_terms.append((np.array([amp, 0.0, 0.0]), lam * w, np.pi / 2.0))
        trig_terms.append((np.array([0.0, amp, 0.0]), lam * w, 0.0))

    scale = -eps * b * w
    linear_z = scale * (bessel_j(0, x_ab) + x_ab * bessel_j(1, x_ab))
    for k in range(1, terms + 1):
        even = scale * ((-1.0) ** k) * bessel_j(2 * k, x_ab) / (k * b * w * w)
        trig_terms.append((np.array([0.0, 0.0, even]), 2 * k * b * w * w, 0.0))
        codd = scale * x_ab * ((-1.0) ** (k + 1)) * bessel_j(2 * k - 1, x_ab)
        trig_terms.append((np.array([0.0, 0.0, codd / (2 * k * b * w * w)]), 2 * k * b * w * w, 0.0))
        if k >= 2:
            freq = (2 * k - 2) * b * w * w
            trig_terms.append((np.array([0.0, 0.0, codd / freq]), freq, 0.0))

    curve = _TrigCurve(trig_terms, linear=(0.0, 0.0, linear_z))
    return curve.to_curve(
        domain,
        meta={
            "family": "j3-series",
            "a": float(a),
            "b": float(b),
            "w": float(w),
            "epsilon": int(eps),
            "terms": int(terms),
            "param": "s",
        },
    )


def j3_partial_series(params: GalleryParams, terms: int, s) -> np.ndarray:
    """Evaluate the truncated depth-3 series at parameter values s."""
    s = np.asarray(s, dtype=float)
    lo = float(np.min(s)) if s.size else 0.0
    hi = float(np.max(s)) if s.size else 1.0
    curve = j3_curve(params, terms, domain=(min(lo, 0.0), max(hi, lo + 1e-9, 1e-9)))
    return curve(s)


def j3_truncation(params: GalleryParams, terms: int) -> BesselTruncation:
    """Estimated size of the first omitted harmonics of the depth-3 series."""
    p = params.euclidean()
    x_ab = p.a / p.b
    tail = abs(bessel_j(2 * terms + 2, x_ab)) + abs(bessel_j(2 * terms + 1, x_ab))
    return BesselTruncation(K=terms, tail_bound=float(tail))
