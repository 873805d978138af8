"""The two constructive lift operators and their iterated chains.

The spherical lift (operator "I") sends a spherical curve gamma to

    alpha(t) = -(cos th(t)/|g'|) g'(t) + (sin th(t)/|g'|) (g(t) x g'(t)),

where th(t) is theta0 plus the prefix integral of det(g, g', g'')/|g'|^2.
alpha lies on the unit sphere identically, alpha'(t) = S(t) g(t) with weight
S = |g'| cos th, and iterating raises the slant order by one per level.

The space lift (operator "J") sends a unit-speed curve to the curve whose
tangent is -cos th N + sin th B with th = theta0 + prefix integral of tau;
it is unit speed by construction, its curvature pair is
(kappa cos th, kappa sin th), and its principal normal is the parent's
tangent, which again raises the slant order by one per level.

Chains keep *signed* speeds, weights and curvatures. With that convention
every phase satisfies a smooth coupled recursion

    th_m' = v_{m-1} sin th_{m-1},    v_m = v_{m-1} cos th_{m-1}    (I-chains)
    th_m' = tau_m = kappa_{m-1} sin th_{m-1}                        (J-chains)

which is integrated once with a high-order adaptive scheme and shared by all
levels; positions then follow either algebraically (I) or by one prefix
integral per level (J). The signed convention keeps the levels continuous
through the cusps where a weight crosses zero, and makes the quadrature form
alpha(t_min) + integral of S*gamma agree with the frame form globally, which
is the main cross-check the verification suite runs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from . import jets
from .curve_core import (
    SPEED_FLOOR,
    Curve3,
    CumulativeIntegral,
    DEFAULT_QUADRATURE,
    QuadratureConfig,
    cumulative_integral,
)
from .errors import (
    BadParams,
    DepthLimit,
    InflectionPoint,
    IrregularCurve,
    NotSpherical,
    NotUnitSpeed,
)

__all__ = [
    "PhaseVector",
    "ChainLevel",
    "CurvaturePair",
    "spherical_weight",
    "apply_I",
    "tangent_indicatrix",
    "negate_then_I",
    "chain_I",
    "apply_J",
    "chain_J",
    "predicted_curvatures",
    "CUSP_WINDOW",
]

MAX_DEPTH = 4
CUSP_WINDOW = 1e-2  # verification skips this half-width around weight zeros
_ODE_RTOL = 1e-12
_ODE_ATOL = 1e-13


@dataclass(frozen=True)
class PhaseVector:
    """Ordered lift phases (theta_0, ..., theta_{n-1}) of an n-deep chain."""

    thetas: tuple[float, ...]

    @classmethod
    def of(cls, value, depth: int | None = None) -> "PhaseVector":
        if isinstance(value, PhaseVector):
            pv = value
        else:
            pv = cls(tuple(float(x) for x in np.atleast_1d(value))) if value is not None else cls(())
        if depth is not None:
            if len(pv.thetas) == 0 and depth > 0:
                pv = cls((0.0,) * depth)
            if len(pv.thetas) != depth:
                raise BadParams(f"need {depth} phases, got {len(pv.thetas)}")
        return pv

    def __len__(self):
        return len(self.thetas)

    def __getitem__(self, i):
        return self.thetas[i]


@dataclass(frozen=True)
class CurvaturePair:
    """Signed curvature/torsion functions of a lifted curve."""

    kappa_bar: Callable[[np.ndarray], np.ndarray]
    tau_bar: Callable[[np.ndarray], np.ndarray]
    domain: tuple[float, float]


@dataclass(frozen=True, eq=False)
class ChainLevel:
    """One rung of a chain: the curve plus the phase and weight that built it.

    `theta` and `weight` describe the construction step from `parent`
    (absent on the seed rung): weight(t) is the signed factor in
    curve'(t) = weight(t) * parent_direction(t). `cusps` lists the parameter
    values where the weight crosses zero; the curve is irregular there and
    verification skips a +-CUSP_WINDOW neighbourhood.
    """

    level: int
    operator: str
    curve: Curve3
    theta: Callable | None = None
    weight: Callable | None = None
    parent: "ChainLevel | None" = None
    cusps: tuple[float, ...] = ()
    curvatures: CurvaturePair | None = None
    frame: Callable | None = None

    def speed(self, ts):
        if self.weight is None:
            return self.curve.speed(ts)
        return np.abs(self.weight(np.asarray(ts, dtype=float)))

    def regular_windows(self, window: float = CUSP_WINDOW):
        lo, hi = self.curve.domain
        points = [lo] + sorted(self.cusps) + [hi]
        out = []
        for a, b in zip(points[:-1], points[1:]):
            left = a if a == lo else a + window
            right = b if b == hi else b - window
            if right > left:
                out.append((left, right))
        return tuple(out)


def _check_spherical_input(curve: Curve3, tol: float = 1e-6):
    ts = np.linspace(curve.t_min, curve.t_max, 65)
    err = np.max(np.abs(np.linalg.norm(curve(ts), axis=-1) - 1.0))
    if err > tol:
        raise NotSpherical(f"input deviates from the unit sphere by {err:.2e}")


def _check_regular_input(curve: Curve3, floor: float = SPEED_FLOOR):
    # sample within the declared regularity windows; curves with marked
    # cusps are legitimate inputs away from them
    worst = np.inf
    for lo, hi in curve.mask():
        ts = np.linspace(lo, hi, max(16, int(257 * (hi - lo) / (curve.t_max - curve.t_min))))
        worst = min(worst, float(np.min(curve.speed(ts))))
    if worst < floor:
        raise IrregularCurve(f"speed falls to {worst:.2e} on the regular windows")


def _theta_rate_jets(g: np.ndarray):
    """Jets of det(g, g', g'')/|g'|^2 from curve jets g."""
    det = jets.jdet3(g, g[1:], g[2:])
    return jets.jmul(det, jets.jrecip(jets.jdot(g[1:], g[1:])))


def spherical_weight(curve: Curve3, theta0: float, cfg: QuadratureConfig = DEFAULT_QUADRATURE):
    """Phase and weight functions of the spherical lift.

    theta(t) = theta0 + prefix integral of det(g, g', g'')/|g'|^2 and
    weight(t) = |g'(t)| cos theta(t); the lift is spherical exactly for this
    weight.
    """
    _check_spherical_input(curve)
    _check_regular_input(curve)

    def rate(ts):
        g = curve.jet(ts, 2)
        det = np.einsum("...i,...i->...", np.cross(g[0], g[1]), g[2])
        return det / np.einsum("...i,...i->...", g[1], g[1])

    prefix = cumulative_integral(rate, curve.domain, cfg)

    def theta_fn(ts):
        return prefix(ts) + theta0

    def weight_fn(ts):
        return curve.speed(ts) * np.cos(theta_fn(ts))

    return theta_fn, weight_fn


def apply_I(curve: Curve3, theta0: float = 0.0, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> ChainLevel:
    """One spherical lift of a regular spherical curve.

    The output is on the unit sphere by construction and satisfies
    alpha'(t) = weight(t) * gamma(t); its derivative closures are exact jets,
    so downstream frame and hierarchy computations inherit full accuracy.
    """
    theta_fn, weight_fn = spherical_weight(curve, theta0, cfg)

    def position(ts):
        g = curve.jet(ts, 1)
        v = np.linalg.norm(g[1], axis=-1)
        th = np.asarray(theta_fn(ts), dtype=float)
        that = g[1] / v[..., None]
        yhat = np.cross(g[0], that)
        return -np.cos(th)[..., None] * that + np.sin(th)[..., None] * yhat

    def derivative(ts, order):
        ts_arr = np.atleast_1d(np.asarray(ts, dtype=float))
        g = curve.jet(ts_arr, order + 1)
        th_jets = np.concatenate(
            [np.atleast_1d(theta_fn(ts_arr))[None], _theta_rate_jets(g)[: order]], axis=0
        )
        sin_j, cos_j = jets.jsincos(th_jets)
        s_jets = jets.jmul(jets.jnorm(g[1:]), cos_j)
        alpha_jets = jets.jmul(s_jets, g)
        out = alpha_jets[order - 1]
        return out if np.asarray(ts).ndim else out[0]

    cusps = _weight_zeros(weight_fn, curve.domain)
    out_curve = Curve3(
        domain=curve.domain,
        position=position,
        derivative=derivative,
        max_order=max(2, min(curve.max_order - 2, 16)),
        regularity_mask=_windows(curve.domain, cusps, SPEED_FLOOR),
        meta=dict(
            curve.meta,
            operator="I",
            level=int(curve.meta.get("level", 0)) + 1,
            theta0=float(theta0),
        ),
    )
    parent = ChainLevel(level=int(curve.meta.get("level", 0)), operator="seed", curve=curve)
    return ChainLevel(
        level=parent.level + 1,
        operator="I",
        curve=out_curve,
        theta=theta_fn,
        weight=weight_fn,
        parent=parent,
        cusps=tuple(cusps),
    )


def negate_then_I(curve: Curve3, theta0: float = 0.0, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> ChainLevel:
    """The lift of the antipodal curve: the inverse-step identity
    I^{-1}(gamma)(t, theta0) = I(-gamma)(t, theta0), taken literally."""
    return apply_I(curve.negated(), theta0, cfg)


def tangent_indicatrix(curve: Curve3) -> Curve3:
    """Unit tangent image t -> g'(t)/|g'(t)|; left-inverts the spherical lift
    wherever the lift's weight is positive (and lands on the antipode where
    it is negative)."""
    _check_regular_input(curve)

    def position(ts):
        g = curve.jet(ts, 1)
        return g[1] / np.linalg.norm(g[1], axis=-1)[..., None]

    def derivative(ts, order):
        ts_arr = np.atleast_1d(np.asarray(ts, dtype=float))
        g = curve.jet(ts_arr, order + 1)
        out = jets.junit(g[1:])[order]
        return out if np.asarray(ts).ndim else out[0]

    return Curve3(
        domain=curve.domain,
        position=position,
        derivative=derivative,
        max_order=max(0, min(curve.max_order - 1, 16)),
        meta=dict(curve.meta, family="tangent-indicatrix"),
    )


def _weight_zeros(weight_fn, domain, n_scan: int = 4096):
    ts = np.linspace(domain[0], domain[1], n_scan)
    vals = weight_fn(ts)
    zeros = []
    sign_change = np.where(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
    for i in sign_change:
        zeros.append(float(brentq(lambda t: float(weight_fn(np.atleast_1d(t))[0]), ts[i], ts[i + 1])))
    return zeros


def _windows(domain, cusps, floor):
    lo, hi = domain
    pts = [lo] + sorted(cusps) + [hi]
    out = []
    eps = 10 * floor
    for a, b in zip(pts[:-1], pts[1:]):
        left = a if a == lo else a + eps
        right = b if b == hi else b - eps
        if right > left:
            out.append((left, right))
    return tuple(out)


# ---------------------------------------------------------------------------
# iterated spherical chains
# ---------------------------------------------------------------------------


class _IChain:
    """Shared state of an iterated spherical chain: one dense solution of the
    coupled phase recursion plus jet builders for every level."""

    def __init__(self, seed: Curve3, depth: int, phases: PhaseVector, cfg: QuadratureConfig):
        self.seed = seed
        self.depth = depth
        self.phases = phases
        self.cfg = cfg
        lo, hi = seed.domain
        if depth > 0:
            sol = solve_ivp(
                self._rhs,
                (lo, hi),
                np.array(phases.thetas, dtype=float),
                method="DOP853",
                dense_output=True,
                rtol=_ODE_RTOL,
                atol=_ODE_ATOL,
            )
            if not sol.success:
                raise IrregularCurve(f"phase recursion failed: {sol.message}")
            self._sol = sol.sol
        else:
            self._sol = None

    def _rhs(self, t, th):
        g = self.seed.jet(float(t), 2)
        v0 = float(np.linalg.norm(g[1]))
        out = np.zeros_like(th)
        out[0] = float(np.dot(np.cross(g[0], g[1]), g[2])) / v0**2
        v = v0
        for m in range(1, len(th)):
            out[m] = v * np.sin(th[m - 1])
            v = v * np.cos(th[m - 1])
        return out

    def thetas(self, ts) -> np.ndarray:
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        return self._sol(ts)

    def speeds(self, ts) -> list[np.ndarray]:
        """Signed speeds v_0..v_depth (v_0 is the true seed speed)."""
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        th = self.thetas(ts)
        v = [self.seed.speed(ts)]
        for m in range(self.depth):
            v.append(v[-1] * np.cos(th[m]))
        return v

    def weight(self, m: int):
        """Signed weight S_m = v_m cos(theta_m) used to build level m+1."""

        def fn(ts):
            ts = np.atleast_1d(np.asarray(ts, dtype=float))
            return self.speeds(ts)[m + 1]

        return fn

    def positions(self, ts) -> list[np.ndarray]:
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        g = self.seed.jet(ts, 1)
        p = [g[0]]
        if self.depth == 0:
            return p
        th = self.thetas(ts)
        v0 = np.linalg.norm(g[1], axis=-1)
        that = g[1] / v0[..., None]
        yhat = np.cross(g[0], that)
        p.append(-np.cos(th[0])[..., None] * that + np.sin(th[0])[..., None] * yhat)
        for m in range(2, self.depth + 1):
            c = np.cos(th[m - 1])[..., None]
            s = np.sin(th[m - 1])[..., None]
            p.append(-c * p[m - 2] + s * np.cross(p[m - 1], p[m - 2]))
        return p

    def level_jets(self, ts, order: int) -> list[np.ndarray]:
        """Exact jets of every level's position, shape (order+1, N, 3)."""
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        g = self.seed.jet(ts, max(order, 2))
        pos = self.positions(ts)
        out = [g[: order + 1]]
        if self.depth == 0:
            return out
        th_vals = self.thetas(ts)
        v_jets = jets.jnorm(g[1:])
        th_jets = np.concatenate([th_vals[0][None], _theta_rate_jets(g)[: order]], axis=0)
        for m in range(self.depth):
            sin_j, cos_j = jets.jsincos(th_jets)
            s_jets = jets.jmul(v_jets, cos_j)  # S_m, signed
            level_jet = np.concatenate([pos[m + 1][None], jets.jmul(s_jets, out[m])[: order]], axis=0)
            out.append(level_jet)
            if m + 1 < self.depth:
                rate = jets.jmul(v_jets, sin_j)  # theta_{m+1}' = v_m sin theta_m
                th_jets = np.concatenate([th_vals[m + 1][None], rate[: order]], axis=0)
                v_jets = s_jets  # v_{m+1} = S_m, signed
        return out


def chain_I(
    seed: Curve3,
    depth: int,
    phases=None,
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
    *,
    strict: bool = True,
    max_depth: int = MAX_DEPTH,
) -> list[ChainLevel]:
    """Iterate the spherical lift `depth` times from a circle seed.

    Returns levels 0..depth; level m carries the phase function theta_{m-1}
    and signed weight that built it. With `strict` the seed must be a circle
    on the unit sphere (constant speed and constant geodesic curvature);
    disable it to chain from any spherical curve.
    """
    if depth > max_depth:
        raise DepthLimit(f"depth {depth} exceeds the error budget (max {max_depth}); override max_depth to force")
    if depth < 0:
        raise BadParams("depth must be non-negative")
    phases = PhaseVector.of(phases, depth)
    _check_spherical_input(seed)
    if strict:
        _check_circle_seed(seed)
    _check_regular_input(seed)

    chain = _IChain(seed, depth, phases, cfg)
    seed_level = ChainLevel(level=0, operator="seed", curve=seed)
    levels = [seed_level]
    for m in range(1, depth + 1):
        weight_fn = chain.weight(m - 1)

        def theta_fn(ts, _m=m - 1):
            return chain.thetas(ts)[_m]

        def position(ts, _m=m):
            arr = np.asarray(ts, dtype=float)
            out = chain.positions(arr.reshape(-1))[_m]
            return out.reshape(arr.shape + (3,)) if arr.ndim else out[0]

        def derivative(ts, k, _m=m):
            arr = np.asarray(ts, dtype=float)
            out = chain.level_jets(arr.reshape(-1), k)[_m][k]
            return out.reshape(arr.shape + (3,)) if arr.ndim else out[0]

        cusps = tuple(_weight_zeros(weight_fn, seed.domain))
        curve = Curve3(
            domain=seed.domain,
            position=position,
            derivative=derivative,
            max_order=10,
            regularity_mask=_windows(seed.domain, cusps, SPEED_FLOOR),
            meta={
                "family": "chain",
                "operator": "I",
                "level": m,
                "theta": list(phases.thetas[:m]),
                "seed": dict(seed.meta),
                "param": seed.meta.get("param", "t"),
            },
        )
        levels.append(
            ChainLevel(
                level=m,
                operator="I",
                curve=curve,
                theta=theta_fn,
                weight=weight_fn,
                parent=levels[m - 1],
                cusps=cusps,
            )
        )
    return levels


def _check_circle_seed(seed: Curve3, tol: float = 1e-8):
    ts = np.linspace(seed.t_min, seed.t_max, 65)
    g = seed.jet(ts, 2)
    v = np.linalg.norm(g[1], axis=-1)
    if np.max(v) - np.min(v) > tol * max(1.0, np.max(v)):
        raise BadParams("strict chain seeds must have constant speed; pass strict=False to override")
    kg = np.einsum("ij,ij->i", np.cross(g[0], g[1]), g[2]) / v**3
    if np.max(kg) - np.min(kg) > 1e-6:
        raise BadParams("strict chain seeds must be circles (constant geodesic curvature)")


# ---------------------------------------------------------------------------
# space chains
# ---------------------------------------------------------------------------


def _check_unit_speed_input(curve: Curve3, tol: float = 1e-8):
    ts = np.linspace(curve.t_min, curve.t_max, 257)
    err = np.max(np.abs(curve.speed(ts) - 1.0))
    if err > tol:
        raise NotUnitSpeed(f"speed deviates from 1 by {err:.2e}")


def _seed_frame_jets(g: np.ndarray, order: int):
    """(T, N, B, kappa) jets of a unit-speed seed with kappa > 0."""
    T = jets.junit(g[1:])
    dT = jets.jshift(T)
    kappa = jets.jnorm(dT)
    if np.any(kappa[0] < SPEED_FLOOR):
        raise InflectionPoint("space lift needs curvature bounded away from zero on the seed")
    N = jets.junit(dT)
    B = jets.jcross(T, N)
    return T, N, B, kappa


class _JChain:
    """Shared state of an iterated space chain."""

    def __init__(self, seed: Curve3, depth: int, phases: PhaseVector, cfg: QuadratureConfig):
        self.seed = seed
        self.depth = depth
        self.phases = phases
        self.cfg = cfg
        lo, hi = seed.domain
        if depth > 0:
            sol = solve_ivp(
                self._rhs,
                (lo, hi),
                np.array(phases.thetas, dtype=float),
                method="DOP853",
                dense_output=True,
                rtol=_ODE_RTOL,
                atol=_ODE_ATOL,
            )
            if not sol.success:
                raise IrregularCurve(f"phase recursion failed: {sol.message}")
            self._sol = sol.sol
        else:
            self._sol = None
        self._positions = self._integrate_positions()

    def _seed_data(self, t: float):
        g = self.seed.jet(float(t), 3)
        T = g[1] / np.linalg.norm(g[1])
        dT = g[2]
        kappa = float(np.linalg.norm(dT))
        tau = 0.0
        cr = np.cross(g[1], g[2])
        cr2 = float(np.dot(cr, cr))
        if cr2 > 0:
            tau = float(np.dot(cr, g[3])) / cr2
        return kappa, tau

    def _rhs(self, t, th):
        kappa0, tau0 = self._seed_data(t)
        out = np.zeros_like(th)
        out[0] = tau0
        kap = kappa0
        for m in range(1, len(th)):
            out[m] = kap * np.sin(th[m - 1])
            kap = kap * np.cos(th[m - 1])
        return out

    def thetas(self, ts) -> np.ndarray:
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        return self._sol(ts)

    def frames(self, ts) -> list[dict]:
        """Smooth frames (T, N, B) of levels 0..depth, plus signed kappa/tau."""
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        g = self.seed.jet(ts, 2)
        T = g[1] / np.linalg.norm(g[1], axis=-1)[..., None]
        dT = g[2]
        kappa = np.linalg.norm(dT, axis=-1)
        N = dT / kappa[..., None]
        B = np.cross(T, N)
        tau = np.zeros_like(kappa)
        out = [{"T": T, "N": N, "B": B, "kappa": kappa, "tau": tau}]
        if self.depth == 0:
            return out
        th = self.thetas(ts)
        for m in range(self.depth):
            c = np.cos(th[m])
            s = np.sin(th[m])
            prev = out[m]
            Tm = -c[..., None] * prev["N"] + s[..., None] * prev["B"]
            Nm = prev["T"]
            Bm = c[..., None] * prev["B"] + s[..., None] * prev["N"]
            out.append(
                {
                    "T": Tm,
                    "N": Nm,
                    "B": Bm,
                    "kappa": prev["kappa"] * c,
                    "tau": prev["kappa"] * s,
                }
            )
        return out

    def _integrate_positions(self):
        integrals = []
        for m in range(1, self.depth + 1):

            def tangent(ts, _m=m):
                return self.frames(ts)[_m]["T"]

            integrals.append(CumulativeIntegral(tangent, self.seed.domain, self.cfg))
        return integrals

    def position(self, m: int, ts) -> np.ndarray:
        ts_arr = np.atleast_1d(np.asarray(ts, dtype=float))
        if m == 0:
            return self.seed(ts_arr)
        return self._positions[m - 1](ts_arr)

    def level_jets(self, ts, order: int) -> list[np.ndarray]:
        """Exact jets of every level's position."""
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        g = self.seed.jet(ts, max(order + 1, 3))
        T, N, B, kappa = _seed_frame_jets(g, order)
        tau = _torsion_jets(g)
        out = [g[: order + 1]]
        if self.depth == 0:
            return out
        th_vals = self.thetas(ts)
        th_jets = np.concatenate([th_vals[0][None], tau[: order]], axis=0)
        for m in range(self.depth):
            common = min(len(th_jets), len(T), len(N), len(B), len(kappa))
            th_jets, T, N, B, kappa = (
                th_jets[:common],
                T[:common],
                N[:common],
                B[:common],
                kappa[:common],
            )
            sin_j, cos_j = jets.jsincos(th_jets)
            Tm = -jets.jmul(cos_j, N) + jets.jmul(sin_j, B)
            Bm = jets.jmul(cos_j, B) + jets.jmul(sin_j, N)
            Nm = T[:common]
            kappa_m = jets.jmul(kappa, cos_j)
            tau_m = jets.jmul(kappa, sin_j)
            pos = self.position(m + 1, ts)
            out.append(np.concatenate([pos[None], Tm[: order]], axis=0))
            if m + 1 < self.depth:
                th_jets = np.concatenate([th_vals[m + 1][None], tau_m[: order]], axis=0)
                T, N, B, kappa = Tm, Nm, Bm, kappa_m
        return out

    def curvature_pair(self, m: int) -> CurvaturePair:
        def kappa_bar(ts, _m=m):
            return self.frames(ts)[_m]["kappa"]

        def tau_bar(ts, _m=m):
            return self.frames(ts)[_m]["tau"]

        return CurvaturePair(kappa_bar=kappa_bar, tau_bar=tau_bar, domain=self.seed.domain)


def _torsion_jets(g: np.ndarray):
    cr = jets.jcross(g[1:], g[2:])
    cr2 = jets.jdot(cr, cr)
    det = jets.jdot(cr, g[3:])
    floor = np.maximum(cr2[0], 1e-30)
    safe = np.concatenate([floor[None], cr2[1:]], axis=0)
    return jets.jmul(det, jets.jrecip(safe))


def chain_J(
    seed: Curve3,
    depth: int,
    phases=None,
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
    *,
    max_depth: int = MAX_DEPTH,
) -> list[ChainLevel]:
    """Iterate the space lift `depth` times from a planar unit-speed seed.

    Level m is an (m-1)-slant curve: level 1 a general helix, level 2 a
    constant-precession (slant) curve for circle seeds, level 3 a 2-slant
    curve. Frames, signed curvature pairs, phases and weights are exposed on
    each rung.
    """
    if depth > max_depth:
        raise DepthLimit(f"depth {depth} exceeds the error budget (max {max_depth}); override max_depth to force")
    if depth < 0:
        raise BadParams("depth must be non-negative")
    phases = PhaseVector.of(phases, depth)
    _check_unit_speed_input(seed)
    _check_planar_seed(seed)

    chain = _JChain(seed, depth, phases, cfg)
    levels = [ChainLevel(level=0, operator="seed", curve=seed, frame=lambda ts: chain.frames(ts)[0])]
    for m in range(1, depth + 1):

        def theta_fn(ts, _m=m - 1):
            return chain.thetas(ts)[_m]

        def weight_fn(ts, _m=m):
            return chain.frames(ts)[_m]["kappa"]  # S_T of the step = signed kappa of this level

        def position(ts, _m=m):
            arr = np.asarray(ts, dtype=float)
            out = chain.position(_m, arr.reshape(-1))
            return out.reshape(arr.shape + (3,)) if arr.ndim else out[0]

        def derivative(ts, k, _m=m):
            arr = np.asarray(ts, dtype=float)
            out = chain.level_jets(arr.reshape(-1), k)[_m][k]
            return out.reshape(arr.shape + (3,)) if arr.ndim else out[0]

        def frame_fn(ts, _m=m):
            return chain.frames(ts)[_m]

        curve = Curve3(
            domain=seed.domain,
            position=position,
            derivative=derivative,
            max_order=10,
            meta={
                "family": "chain",
                "operator": "J",
                "level": m,
                "theta": list(phases.thetas[:m]),
                "seed": dict(seed.meta),
                "param": "s",
            },
        )
        levels.append(
            ChainLevel(
                level=m,
                operator="J",
                curve=curve,
                theta=theta_fn,
                weight=weight_fn,
                parent=levels[m - 1],
                cusps=tuple(_weight_zeros(weight_fn, seed.domain)),
                curvatures=chain.curvature_pair(m),
                frame=frame_fn,
            )
        )
    return levels


def _check_planar_seed(seed: Curve3, tol: float = 1e-8):
    ts = np.linspace(seed.t_min, seed.t_max, 65)
    g = seed.jet(ts, 3)
    cr = np.cross(g[1], g[2])
    cr2 = np.einsum("ij,ij->i", cr, cr)
    if np.any(cr2 < SPEED_FLOOR**2):
        raise InflectionPoint("seed curvature vanishes; the space lift frame is undefined")
    tau = np.abs(np.einsum("ij,ij->i", cr, g[3])) / cr2
    if np.max(tau) > tol:
        raise BadParams(f"seed torsion reaches {np.max(tau):.2e}; space chains start from planar curves")


def apply_J(
    curve: Curve3,
    theta0: float = 0.0,
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
    *,
    route: str = "frame",
) -> tuple[ChainLevel, CurvaturePair]:
    """One space lift of a unit-speed curve with positive curvature.

    The default frame route integrates beta' = -cos th N + sin th B, which is
    unit speed identically; the direct route integrates beta'' = S_T g'
    twice and exists as an independent cross-check. Returns the new rung and
    the predicted signed curvature pair (kappa cos th, kappa sin th).
    """
    _check_unit_speed_input(curve)
    if route not in ("frame", "direct"):
        raise ValueError(f"unknown route {route!r}")

    def seed_frame(ts):
        g = curve.jet(ts, 3)
        T = g[1] / np.linalg.norm(g[1], axis=-1)[..., None]
        kappa = np.linalg.norm(g[2], axis=-1)
        if np.any(kappa < SPEED_FLOOR):
            raise InflectionPoint("curvature vanishes on the lift window")
        N = g[2] / kappa[..., None]
        B = np.cross(T, N)
        cr = np.cross(g[1], g[2])
        tau = np.einsum("...i,...i->...", cr, g[3]) / np.einsum("...i,...i->...", cr, cr)
        return T, N, B, kappa, tau

    def tau_fn(ts):
        return seed_frame(np.atleast_1d(ts))[4]

    prefix = cumulative_integral(tau_fn, curve.domain, cfg)

    def theta_fn(ts):
        return prefix(ts) + theta0

    def kappa_fn(ts):
        return seed_frame(np.atleast_1d(ts))[3]

    def weight_fn(ts):
        return kappa_fn(ts) * np.cos(theta_fn(np.atleast_1d(ts)))

    def beta_prime(ts):
        T, N, B, kappa, tau = seed_frame(np.atleast_1d(ts))
        th = theta_fn(np.atleast_1d(ts))
        return -np.cos(th)[..., None] * N + np.sin(th)[..., None] * B

    if route == "frame":
        position_integral = CumulativeIntegral(beta_prime, curve.domain, cfg)

        def position(ts):
            out = position_integral(np.atleast_1d(ts))
            return out if np.asarray(ts).ndim else out[0]

    else:
        def second_derivative(ts):
            ts = np.atleast_1d(ts)
            g = curve.jet(ts, 1)
            return weight_fn(ts)[..., None] * g[1]

        dprime = CumulativeIntegral(second_derivative, curve.domain, cfg)
        b0 = beta_prime(np.array([curve.t_min]))[0]

        def velocity(ts):
            return dprime(np.atleast_1d(ts)) + b0

        position_integral = CumulativeIntegral(velocity, curve.domain, cfg)

        def position(ts):
            out = position_integral(np.atleast_1d(ts))
            return out if np.asarray(ts).ndim else out[0]

    def derivative(ts, order):
        ts_arr = np.atleast_1d(np.asarray(ts, dtype=float))
        g = curve.jet(ts_arr, max(order + 1, 3))
        T, N, B, kappa = _seed_frame_jets(g, order)
        tau = _torsion_jets(g)
        th_jets = np.concatenate([np.atleast_1d(theta_fn(ts_arr))[None], tau[: order]], axis=0)
        sin_j, cos_j = jets.jsincos(th_jets)
        Tm = -jets.jmul(cos_j, N) + jets.jmul(sin_j, B)
        out = Tm[order - 1]
        return out if np.asarray(ts).ndim else out[0]

    pair = CurvaturePair(
        kappa_bar=lambda ts: weight_fn(ts),
        tau_bar=lambda ts: kappa_fn(ts) * np.sin(theta_fn(np.atleast_1d(ts))),
        domain=curve.domain,
    )
    out_curve = Curve3(
        domain=curve.domain,
        position=position,
        derivative=derivative,
        max_order=max(2, min(curve.max_order - 2, 10)),
        meta=dict(
            curve.meta,
            operator="J",
            level=int(curve.meta.get("level", 0)) + 1,
            theta0=float(theta0),
            param="s",
        ),
    )
    parent = ChainLevel(level=int(curve.meta.get("level", 0)), operator="seed", curve=curve)
    level = ChainLevel(
        level=parent.level + 1,
        operator="J",
        curve=out_curve,
        theta=theta_fn,
        weight=weight_fn,
        parent=parent,
        cusps=tuple(_weight_zeros(weight_fn, curve.domain)),
        curvatures=pair,
    )
    return level, pair


def predicted_curvatures(
    kappa: Callable,
    tau: Callable,
    theta0: float,
    domain: tuple[float, float],
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
) -> CurvaturePair:
    """Closed-form curvature pair of a space lift from scalar curvature and
    torsion functions: (kappa cos Th, kappa sin Th) with Th the prefix
    integral of tau plus theta0."""
    prefix = cumulative_integral(lambda ts: np.asarray(tau(ts), dtype=float), domain, cfg)

    def angle(ts):
        return prefix(ts) + theta0

    return CurvaturePair(
        kappa_bar=lambda ts: np.asarray(kappa(ts), dtype=float) * np.cos(angle(ts)),
        tau_bar=lambda ts: np.asarray(kappa(ts), dtype=float) * np.sin(angle(ts)),
        domain=domain,
    )
