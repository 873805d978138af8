"""Curve representation, differentiation, quadrature and resampling.

The substrate for everything else: a `Curve3` is a parametric curve in R^3
over a closed interval, with derivative access up to a declared order and an
order-4 finite-difference fallback beyond it. `cumulative_integral` is the
prefix-integral engine (composite Gauss-Legendre or Simpson panels) that the
constructive operators consume.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .errors import (
    IrregularCurve,
    NonFiniteSample,
    OrderUnavailable,
    OutOfDomain,
)
from . import jets

__all__ = [
    "SPEED_FLOOR",
    "Curve3",
    "SampledCurve",
    "QuadratureConfig",
    "CumulativeIntegral",
    "eval_derivatives",
    "cumulative_integral",
    "arc_length_reparametrize",
    "resample",
    "sampled_to_curve",
]

SPEED_FLOOR = 1e-8

# Central stencils of order-4 accuracy: {derivative order: (offsets, weights)}.
_FD_STENCILS = {
    1: (np.arange(-2, 3), np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0),
    2: (np.arange(-2, 3), np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0),
    3: (np.arange(-3, 4), np.array([1.0, -8.0, 13.0, 0.0, -13.0, 8.0, -1.0]) / 8.0),
    4: (np.arange(-3, 4), np.array([-1.0, 12.0, -39.0, 56.0, -39.0, 12.0, -1.0]) / 6.0),
}


@dataclass(frozen=True, eq=False)
class Curve3:
    """A parametric space curve t -> R^3 on a closed interval.

    `position` maps a float or array of parameters to points of shape
    (..., 3). `derivative(t, order)` returns exact derivatives for
    1 <= order <= max_order; beyond that (and only up to order 4) a central
    finite-difference fallback is used. `regularity_mask` lists the
    subintervals on which the speed stays above `SPEED_FLOOR`; an empty
    tuple means the whole domain.
    """

    domain: tuple[float, float]
    position: Callable[..., np.ndarray]
    derivative: Callable[..., np.ndarray] | None = None
    max_order: int = 0
    regularity_mask: tuple[tuple[float, float], ...] = ()
    meta: dict = field(default_factory=dict)

    def __call__(self, t):
        return self.position(np.asarray(t, dtype=float))

    @property
    def t_min(self) -> float:
        return self.domain[0]

    @property
    def t_max(self) -> float:
        return self.domain[1]

    def mask(self) -> tuple[tuple[float, float], ...]:
        return self.regularity_mask if self.regularity_mask else (self.domain,)

    def contains(self, t) -> bool:
        t = np.asarray(t, dtype=float)
        lo, hi = self.domain
        pad = 1e-12 * max(1.0, abs(hi - lo))
        return bool(np.all((t >= lo - pad) & (t <= hi + pad)))

    def jet(self, t, order: int, h: float | None = None) -> np.ndarray:
        """Stack [gamma, gamma', ..., gamma^(order)](t), shape (order+1, ..., 3)."""
        t = np.asarray(t, dtype=float)
        if not self.contains(t):
            raise OutOfDomain(f"parameter outside domain {self.domain}")
        parts = [self.position(t)]
        analytic = min(order, self.max_order) if self.derivative is not None else 0
        for k in range(1, analytic + 1):
            parts.append(self.derivative(t, k))
        for k in range(analytic + 1, order + 1):
            parts.append(_fd_derivative(self, t, k, h))
        return np.stack(parts, axis=0)

    def speed(self, t) -> np.ndarray:
        return np.linalg.norm(self.jet(t, 1)[1], axis=-1)

    def negated(self) -> "Curve3":
        pos, der = self.position, self.derivative
        return replace(
            self,
            position=lambda t: -pos(t),
            derivative=None if der is None else (lambda t, k: -der(t, k)),
            meta=dict(self.meta, negated=True),
        )


def _fd_step(curve: Curve3, h: float | None) -> float:
    if h is not None:
        return h
    lo, hi = curve.domain
    return (hi - lo) * 1e-4


def _fornberg_weights(x: np.ndarray, x0: float, m: int) -> np.ndarray:
    """Finite-difference weights for the m-th derivative at x0 on nodes x."""
    n = len(x)
    c = np.zeros((n, m + 1))
    c1, c4 = 1.0, x[0] - x0
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, m)
        c2, c5, c4 = 1.0, c4, x[i] - x0
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, m]


def _fd_derivative(curve: Curve3, t, order: int, h: float | None = None) -> np.ndarray:
    """Central stencils of order-4 accuracy; near the boundary the stencil
    slides inside the domain with weights recomputed for the off-center
    target (same accuracy order, 9 nodes)."""
    if order > 4:
        raise OrderUnavailable(
            f"order {order} not available: analytic derivatives stop at "
            f"{curve.max_order} and the finite-difference fallback covers orders <= 4"
        )
    step = _fd_step(curve, h)
    offsets, weights = _FD_STENCILS[order]
    t = np.asarray(t, dtype=float)
    lo, hi = curve.domain
    width = offsets[-1] * step
    if 8 * step > (hi - lo) + 1e-15:
        raise OrderUnavailable(
            f"finite-difference stencil of width {8 * step:g} does not fit inside the domain"
        )
    t_flat = np.atleast_1d(t).reshape(-1)
    centered = (t_flat - width >= lo - 1e-15) & (t_flat + width <= hi + 1e-15)
    out = np.empty(t_flat.shape + (3,))
    if np.any(centered):
        samples = curve.position(t_flat[centered, None] + offsets * step)
        out[centered] = np.tensordot(samples, weights, axes=([-2], [0])) / step**order
    for i in np.where(~centered)[0]:
        start = min(max(t_flat[i] - 4 * step, lo), hi - 8 * step)
        nodes = start + np.arange(9) * step
        w = _fornberg_weights(nodes, t_flat[i], order)
        out[i] = np.tensordot(curve.position(nodes), w, axes=([0], [0]))
    return out.reshape(t.shape + (3,)) if t.ndim else out[0]


def eval_derivatives(curve: Curve3, t: float, order: int, h: float | None = None):
    """Return [gamma(t), gamma'(t), ..., gamma^(order)(t)] as a list of vectors.

    Analytic derivatives are used up to `curve.max_order`; beyond that a
    central finite-difference stencil of order-4 accuracy with step `h`
    (default: domain length * 1e-4) covers orders up to 4.
    """
    if not curve.contains(t):
        raise OutOfDomain(f"t={t} outside domain {curve.domain}")
    jet = curve.jet(float(t), order, h=h)
    return [jet[k] for k in range(order + 1)]


@dataclass(frozen=True)
class SampledCurve:
    """A curve reduced to points on a strictly increasing parameter grid."""

    grid: np.ndarray
    points: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        points = np.asarray(self.points, dtype=float)
        if grid.ndim != 1 or points.shape != (grid.size, 3):
            raise ValueError("grid must be 1-d and points must be (len(grid), 3)")
        if not np.all(np.diff(grid) > 0):
            raise ValueError("grid must be strictly increasing")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "points", points)

    # -- serialization ----------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "meta": self.meta,
            "grid": self.grid.tolist(),
            "points": self.points.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    @classmethod
    def from_json_dict(cls, data: dict) -> "SampledCurve":
        return cls(
            grid=np.asarray(data["grid"], dtype=float),
            points=np.asarray(data["points"], dtype=float),
            meta=dict(data.get("meta", {})),
        )

    @classmethod
    def from_json(cls, text: str) -> "SampledCurve":
        return cls.from_json_dict(json.loads(text))

    def to_csv(self) -> str:
        name = self.meta.get("param", "t")
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([name, "x", "y", "z"])
        for t, p in zip(self.grid, self.points):
            writer.writerow([repr(float(t)), repr(float(p[0])), repr(float(p[1])), repr(float(p[2]))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, meta: dict | None = None) -> "SampledCurve":
        rows = list(csv.reader(io.StringIO(text)))
        header, data = rows[0], rows[1:]
        if len(header) < 4:
            raise ValueError("expected a header like t,x,y,z")
        grid = np.array([float(r[0]) for r in data])
        points = np.array([[float(r[1]), float(r[2]), float(r[3])] for r in data])
        meta = dict(meta or {})
        meta.setdefault("param", header[0])
        return cls(grid=grid, points=points, meta=meta)


def resample(curve: Curve3, n: int) -> SampledCurve:
    """Evaluate the curve on a uniform grid of n points over its domain."""
    if n < 2:
        raise ValueError("resample needs n >= 2")
    grid = np.linspace(curve.t_min, curve.t_max, n)
    return SampledCurve(grid=grid, points=curve(grid), meta=dict(curve.meta))


def sampled_to_curve(sc: SampledCurve) -> Curve3:
    """Rebuild a Curve3 from samples; derivatives come from grid stencils.

    The grid must be uniform. Derivative orders up to 4 are available in the
    grid interior (order-4 accurate stencils); near the edges the stencil is
    shifted onto one-sided differences of the same width.
    """
    grid, pts = sc.grid, sc.points
    h = np.diff(grid)
    if not np.allclose(h, h[0], rtol=1e-9, atol=0):
        raise ValueError("sampled_to_curve requires a uniform grid")
    step = float(h[0])

    def position(t):
        t = np.asarray(t, dtype=float)
        out = np.stack([np.interp(t, grid, pts[:, i]) for i in range(3)], axis=-1)
        return out

    def derivative(t, order):
        t_in = np.asarray(t, dtype=float)
        t_arr = np.atleast_1d(t_in).reshape(-1)
        offsets, weights = _FD_STENCILS[order]
        half = int(offsets[-1])
        idx = np.clip(np.rint((t_arr - grid[0]) / step).astype(int), half, len(grid) - 1 - half)
        windows = pts[idx[:, None] + offsets]
        val = np.tensordot(windows, weights, axes=([1], [0])) / step**order
        return val.reshape(t_in.shape + (3,)) if t_in.ndim else val[0]

    return Curve3(
        domain=(float(grid[0]), float(grid[-1])),
        position=position,
        derivative=derivative,
        max_order=4,
        meta=dict(sc.meta, sampled=True, samples=len(grid)),
    )


# ---------------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadratureConfig:
    """Prefix-integral settings.

    `panels` counts panels per unit of parameter length (at least 16 panels
    total are always used; chain constructions need the headroom since they
    nest several prefix integrals). `nodes` is the Gauss-Legendre point count
    per panel, or the Simpson subinterval count. `richardson` switches on one
    extrapolation level for the Simpson rule.
    """

    rule: str = "gauss-legendre"
    panels: int = 64
    nodes: int = 10
    richardson: bool = False

    def __post_init__(self):
        if self.rule not in ("gauss-legendre", "simpson"):
            raise ValueError(f"unknown quadrature rule {self.rule!r}")
        if self.panels < 1:
            raise ValueError("panels must be positive")


DEFAULT_QUADRATURE = QuadratureConfig()


def _check_finite(values):
    if not np.all(np.isfinite(values)):
        raise NonFiniteSample("integrand returned a non-finite value")
    return values


class CumulativeIntegral:
    """F(t) = integral of f from t_min to t, evaluable anywhere in the domain.

    Panel boundaries are uniform (plus caller-supplied breakpoints, used to
    keep kinks of piecewise-smooth integrands on panel edges); within a panel
    the configured rule is applied, and partial panels are integrated with
    the same rule at call time. f must be vectorized; values may be scalar or
    vector (last axis 3).
    """

    def __init__(
        self,
        f: Callable[[np.ndarray], np.ndarray],
        domain: tuple[float, float],
        cfg: QuadratureConfig = DEFAULT_QUADRATURE,
        breakpoints: Sequence[float] = (),
    ):
        lo, hi = float(domain[0]), float(domain[1])
        if hi <= lo:
            raise ValueError("domain must have positive length")
        self.f = f
        self.domain = (lo, hi)
        self.cfg = cfg
        n_panels = max(16, int(math.ceil(cfg.panels * (hi - lo))))
        edges = np.linspace(lo, hi, n_panels + 1)
        interior = [b for b in breakpoints if lo < b < hi]
        if interior:
            edges = np.unique(np.concatenate([edges, np.asarray(interior, dtype=float)]))
        self.edges = edges
        if cfg.rule == "gauss-legendre":
            x, w = np.polynomial.legendre.leggauss(cfg.nodes)
        else:
            # composite Simpson on the reference interval [-1, 1]
            m = max(2, cfg.nodes + (cfg.nodes % 2))
            x = np.linspace(-1.0, 1.0, m + 1)
            w = np.ones(m + 1)
            w[1:-1:2] = 4.0
            w[2:-1:2] = 2.0
            w *= (2.0 / m) / 3.0
        self._ref_x, self._ref_w = x, w
        self._prefix = self._build_prefix()

    def _panel_values(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Integrals of f over each [a_i, b_i] with the per-panel rule."""
        mid = 0.5 * (a + b)
        half = 0.5 * (b - a)
        pts = mid[:, None] + half[:, None] * self._ref_x
        vals = _check_finite(self.f(pts.reshape(-1)))
        vals = np.asarray(vals, dtype=float)
        tail = vals.shape[1:]
        vals = vals.reshape(pts.shape + tail)
        acc = np.tensordot(vals, self._ref_w, axes=([1], [0]))
        return acc * half.reshape(half.shape + (1,) * len(tail))

    def _build_prefix(self) -> np.ndarray:
        contrib = self._panel_values(self.edges[:-1], self.edges[1:])
        prefix = np.zeros((len(self.edges),) + contrib.shape[1:])
        np.cumsum(contrib, axis=0, out=prefix[1:])
        return prefix

    def __call__(self, t):
        t_in = np.asarray(t, dtype=float)
        t_arr = np.atleast_1d(t_in).reshape(-1)
        lo, hi = self.domain
        pad = 1e-12 * max(1.0, hi - lo)
        if np.any(t_arr < lo - pad) or np.any(t_arr > hi + pad):
            raise OutOfDomain(f"query outside integration domain {self.domain}")
        t_arr = np.clip(t_arr, lo, hi)
        idx = np.clip(np.searchsorted(self.edges, t_arr, side="right") - 1, 0, len(self.edges) - 2)
        left = self.edges[idx]
        partial = self._panel_values(left, t_arr)
        out = self._prefix[idx] + partial
        tail = out.shape[1:]
        if t_in.ndim == 0:
            return out[0]
        return out.reshape(t_in.shape + tail)

    def total(self):
        return self._prefix[-1]


class _RichardsonCumulative:
    """One Richardson extrapolation step combining two panel resolutions."""

    def __init__(self, coarse: CumulativeIntegral, fine: CumulativeIntegral, order: int):
        self.coarse = coarse
        self.fine = fine
        self.factor = 1.0 / (2.0**order - 1.0)
        self.domain = coarse.domain

    def __call__(self, t):
        fine = self.fine(t)
        return fine + (fine - self.coarse(t)) * self.factor

    def total(self):
        fine = self.fine.total()
        return fine + (fine - self.coarse.total()) * self.factor


def cumulative_integral(
    f: Callable[[np.ndarray], np.ndarray],
    domain: tuple[float, float],
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
    breakpoints: Sequence[float] = (),
):
    """Build F with F(t_min) = 0 and F(t) ~ integral of f over [t_min, t]."""
    base = CumulativeIntegral(f, domain, cfg, breakpoints)
    if not cfg.richardson:
        return base
    fine_cfg = QuadratureConfig(rule=cfg.rule, panels=2 * cfg.panels, nodes=cfg.nodes)
    fine = CumulativeIntegral(f, domain, fine_cfg, breakpoints)
    order = 4 if cfg.rule == "simpson" else 2 * cfg.nodes
    return _RichardsonCumulative(base, fine, order)


# ---------------------------------------------------------------------------
# arc-length reparametrization
# ---------------------------------------------------------------------------


def arc_length_reparametrize(
    curve: Curve3,
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
    *,
    n_grid: int = 4097,
    speed_floor: float = SPEED_FLOOR,
) -> Curve3:
    """Reparametrize by arc length; the result has unit speed on [0, L].

    A curve that is already unit speed (to 1e-10 on a dense sample) is
    returned unchanged, which makes the operation exactly idempotent.
    """
    lo, hi = curve.domain
    probe = np.linspace(lo, hi, 257)
    speeds = curve.speed(probe)
    if np.any(speeds < speed_floor):
        raise IrregularCurve("speed below floor; curve is not regular on its domain")
    if np.max(np.abs(speeds - 1.0)) <= 1e-10:
        return curve

    speed_fn = lambda t: np.linalg.norm(curve.jet(t, 1)[1], axis=-1)
    s_of_t = cumulative_integral(speed_fn, curve.domain, cfg)
    ts = np.linspace(lo, hi, n_grid)
    ss = np.atleast_1d(s_of_t(ts))
    length = float(ss[-1])

    def t_of_s(s):
        s = np.clip(np.asarray(s, dtype=float), 0.0, length)
        t = np.asarray(np.interp(s, ss, ts))
        for _ in range(2):  # Newton refinement on s(t) - s = 0
            t = np.clip(t - (s_of_t(t) - s) / speed_fn(t), lo, hi)
        return t

    def position(s):
        return curve.position(t_of_s(s))

    def derivative(s, order):
        s_arr = np.atleast_1d(np.asarray(s, dtype=float))
        t = t_of_s(s_arr)
        g = curve.jet(t, order)
        # derivatives with respect to arc length: repeatedly apply (1/v) d/dt
        w = jets.jrecip(jets.jnorm(g[1:]))
        current = g
        for _ in range(order):
            current = jets.jmul(jets.jshift(current), w)
        out = current[0]
        return out if np.asarray(s).ndim else out[0]

    return Curve3(
        domain=(0.0, length),
        position=position,
        derivative=derivative,
        max_order=max(0, curve.max_order - 1) if curve.derivative is not None else 0,
        meta=dict(curve.meta, unit_speed=True, length=length),
    )
