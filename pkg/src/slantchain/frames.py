"""Frenet apparatus, Sabban frame, normalized-derivative hierarchy, centrode.

The hierarchy follows the usual convention for k-slant analysis: psi_1 is
the unit tangent, psi_{k+1} = psi_k' / |psi_k'|, and for spherical curves
the position itself joins in as psi_0. Level-k curvature data (kappa_k,
tau_k, sigma_k) obey the recursion

    kappa_k = sqrt(kappa_{k-1}^2 + tau_{k-1}^2),   tau_k = sigma_{k-1} kappa_k,

with sigma the geodesic curvature of the principal-normal image. All point
quantities are produced from exact jet arithmetic; batched variants apply a
sign-continuity convention so that frames stay continuous across curvature
sign changes (canonical Frenet frames flip there).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import jets
from .curve_core import Curve3
from .errors import DegenerateLevel, InflectionPoint, NotSpherical, NotUnitSpeed

__all__ = [
    "FrenetData",
    "SabbanData",
    "PsiLevel",
    "DarbouxData",
    "frenet_apparatus",
    "frenet_samples",
    "sabban_frame",
    "psi_hierarchy",
    "psi_samples",
    "centrode",
    "arclength_jets",
]

_INFLECTION_TOL = 1e-10
_DEGENERATE_TOL = 1e-12


@dataclass(frozen=True)
class FrenetData:
    """Frenet frame and curvatures at one parameter value.

    At inflection points (curvature below tolerance) N, B and tau are None
    rather than extrapolated.
    """

    t: float
    T: np.ndarray
    N: np.ndarray | None
    B: np.ndarray | None
    kappa: float
    tau: float | None

    def matrix(self) -> np.ndarray:
        """Frame as a 3x3 matrix with columns T, N, B."""
        if self.N is None or self.B is None:
            raise InflectionPoint(f"frame incomplete at t={self.t}")
        return np.stack([self.T, self.N, self.B], axis=1)


@dataclass(frozen=True)
class SabbanData:
    t: float
    gamma: np.ndarray
    T: np.ndarray
    Y: np.ndarray
    kappa_g: float


@dataclass(frozen=True)
class PsiLevel:
    """One level of the normalized-derivative hierarchy.

    `psi` is None at k=0 for non-spherical curves (the hierarchy starts at
    the tangent there); curvature entries are None when the curve's
    derivative order cannot support them.
    """

    k: int
    psi: np.ndarray | None
    kappa_k: float | None
    tau_k: float | None
    sigma_k: float | None


@dataclass(frozen=True)
class DarbouxData:
    k: int
    W_k: np.ndarray
    A_k: np.ndarray | None
    omega: float | None


def arclength_jets(curve: Curve3, ts, order: int, h: float | None = None) -> np.ndarray:
    """Derivatives of the curve with respect to its own arc length.

    Returns shape (order+1, ..., 3). For a unit-speed curve this equals the
    plain parameter jet.
    """
    g = curve.jet(ts, order, h=h)
    if order == 0:
        return g
    w = jets.jrecip(jets.jnorm(g[1:]))
    out = [g[0]]
    current = g
    for _ in range(order):
        current = jets.jmul(jets.jshift(current), w)
        out.append(current[0])
    return np.stack(out, axis=0)


def _looks_spherical(curve: Curve3, tol: float = 1e-6) -> bool:
    ts = np.linspace(curve.t_min, curve.t_max, 33)
    return bool(np.max(np.abs(np.linalg.norm(curve(ts), axis=-1) - 1.0)) <= tol)


def frenet_apparatus(curve: Curve3, t: float, *, strict: bool = True, h: float | None = None) -> FrenetData:
    """Frenet frame {T, N, B} with curvature and torsion at t.

    kappa = |g' x g''| / |g'|^3 and tau = det(g', g'', g''') / |g' x g''|^2;
    the frame is right-handed by construction. Raises InflectionPoint in
    strict mode when the curvature vanishes; otherwise returns partial data.
    """
    g = curve.jet(float(t), 3, h=h)
    v = float(np.linalg.norm(g[1]))
    T = g[1] / v
    cr = np.cross(g[1], g[2])
    cr_norm = float(np.linalg.norm(cr))
    kappa = cr_norm / v**3
    if kappa < _INFLECTION_TOL:
        if strict:
            raise InflectionPoint(f"curvature {kappa:.3e} below tolerance at t={t}")
        return FrenetData(t=float(t), T=T, N=None, B=None, kappa=kappa, tau=None)
    B = cr / cr_norm
    N = np.cross(B, T)
    tau = float(np.dot(cr, g[3])) / cr_norm**2
    return FrenetData(t=float(t), T=T, N=N, B=B, kappa=kappa, tau=tau)


def frenet_samples(curve: Curve3, ts, *, continuity: bool = True, h: float | None = None) -> dict:
    """Vectorized Frenet data along a parameter grid.

    With `continuity=True` the normal (and binormal) keep a continuous sign
    across curvature zero-crossings, and `kappa` is reported with the
    matching sign; torsion is sign-invariant under that flip. Inflection
    samples give NaN rows.
    """
    ts = np.asarray(ts, dtype=float)
    g = curve.jet(ts, 3, h=h)
    v = np.linalg.norm(g[1], axis=-1)
    T = g[1] / v[..., None]
    cr = np.cross(g[1], g[2])
    cr_norm = np.linalg.norm(cr, axis=-1)
    kappa = cr_norm / v**3
    ok = kappa >= _INFLECTION_TOL
    with np.errstate(invalid="ignore", divide="ignore"):
        B = np.where(ok[..., None], cr / np.where(ok, cr_norm, 1.0)[..., None], np.nan)
        tau = np.where(ok, np.einsum("...i,...i->...", cr, g[3]) / np.where(ok, cr_norm, 1.0) ** 2, np.nan)
    N = np.cross(B, T)
    if continuity and ts.ndim == 1 and len(ts) > 1:
        sign = _continuity_signs(N)
        N = N * sign[:, None]
        B = B * sign[:, None]
        kappa = kappa * sign
    return {"T": T, "N": N, "B": B, "kappa": kappa, "tau": tau, "speed": v}


def _continuity_signs(vectors: np.ndarray) -> np.ndarray:
    """Per-sample signs making a +-1-ambiguous vector sequence continuous."""
    dots = np.einsum("ij,ij->i", vectors[1:], vectors[:-1])
    flips = np.where(np.isnan(dots), 1.0, np.where(dots < 0.0, -1.0, 1.0))
    return np.concatenate([[1.0], np.cumprod(flips)])


def sabban_frame(curve: Curve3, s: float, *, tol: float = 1e-6) -> SabbanData:
    """Frame {gamma, T, gamma x T} of a unit-speed spherical curve, with the
    geodesic curvature det(gamma, T, T')."""
    g = curve.jet(float(s), 2)
    if abs(np.linalg.norm(g[0]) - 1.0) > tol:
        raise NotSpherical(f"|gamma| = {np.linalg.norm(g[0]):.6f} at s={s}")
    if abs(np.linalg.norm(g[1]) - 1.0) > tol:
        raise NotUnitSpeed(f"speed = {np.linalg.norm(g[1]):.6f} at s={s}")
    T = g[1]
    Y = np.cross(g[0], T)
    kappa_g = float(np.dot(np.cross(g[0], T), g[2]))
    return SabbanData(t=float(s), gamma=g[0], T=T, Y=Y, kappa_g=kappa_g)


# ---------------------------------------------------------------------------
# normalized-derivative hierarchy
# ---------------------------------------------------------------------------


def _psi_jets(s_jets: np.ndarray, k_max: int) -> list[np.ndarray]:
    """Jets of psi_1..psi_{k_max} from arc-length jets of the curve."""
    chains = []
    current = jets.junit(jets.jshift(s_jets))  # psi_1 = T
    chains.append(current)
    for k in range(2, k_max + 1):
        d = jets.jshift(current)
        norms = np.sqrt(np.einsum("...i,...i->...", d[0], d[0]))
        if np.any(norms < _DEGENERATE_TOL):
            raise DegenerateLevel(k)
        current = jets.junit(d)
        chains.append(current)
    return chains


def _jadd(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    m = min(len(a), len(b))
    return a[:m] + b[:m]


def _curvature_jets(s_jets: np.ndarray, k_max: int):
    """Jets of (kappa_k, tau_k, sigma_k) for k = 0..k_max via the recursion."""
    d1, d2, d3 = s_jets[1:], s_jets[2:], s_jets[3:]
    cr = jets.jcross(d1, d2)
    cr2 = jets.jdot(cr, cr)
    v2 = jets.jdot(d1, d1)
    v3 = jets.jmul(jets.jsqrt(v2), v2)
    kappa = jets.jmul(jets.jsqrt(cr2), jets.jrecip(v3))
    tau = jets.jmul(jets.jdot(cr, d3), jets.jrecip(cr2))
    levels = []
    for k in range(k_max + 1):
        sigma = None
        if len(kappa) >= 2 and len(tau) >= 2:
            ratio = jets.jmul(tau, jets.jrecip(kappa))
            k2t2 = _jadd(jets.jmul(kappa, kappa), jets.jmul(tau, tau))
            power = jets.jmul(jets.jsqrt(k2t2), k2t2)  # (kappa^2 + tau^2)^(3/2)
            sigma = jets.jmul(jets.jmul(jets.jmul(kappa, kappa), jets.jrecip(power)), jets.jshift(ratio))
        levels.append((kappa, tau, sigma))
        if sigma is None:
            break
        next_kappa = jets.jsqrt(_jadd(jets.jmul(kappa, kappa), jets.jmul(tau, tau)))
        next_tau = jets.jmul(sigma, next_kappa)
        kappa, tau = next_kappa, next_tau
    return levels


def psi_hierarchy(curve: Curve3, k_max: int, t: float, *, spherical: bool | None = None) -> list[PsiLevel]:
    """Hierarchy levels k = 0..k_max at one parameter value.

    psi_0 is the position for spherical curves and None otherwise. Each level
    carries (kappa_k, tau_k, sigma_k); entries that would need derivative
    orders beyond what the curve can provide are None.
    """
    if spherical is None:
        spherical = _looks_spherical(curve)
    order = k_max + 4
    if curve.derivative is None or curve.max_order < order:
        order = min(order, max(4, curve.max_order))
    s_jets = arclength_jets(curve, np.atleast_1d(float(t)), order)
    psis = _psi_jets(s_jets, max(k_max, 1))
    curv = _curvature_jets(s_jets, k_max)
    out = []
    for k in range(k_max + 1):
        if k == 0:
            psi = s_jets[0][0] if spherical else None
        elif k <= len(psis):
            psi = psis[k - 1][0][0]
        else:
            psi = None
        kap = tau = sig = None
        if k < len(curv):
            kj, tj, sj = curv[k]
            kap = float(kj[0][0]) if len(kj) else None
            tau = float(tj[0][0]) if len(tj) else None
            sig = float(sj[0][0]) if sj is not None and len(sj) else None
        out.append(PsiLevel(k=k, psi=psi, kappa_k=kap, tau_k=tau, sigma_k=sig))
    return out


def psi_samples(
    curve: Curve3,
    k_max: int,
    ts,
    *,
    spherical: bool | None = None,
    continuity: bool = True,
) -> dict:
    """Batched hierarchy along a grid, with sign-continuous frames.

    Returns {"psi": [k -> (N,3) or None], "kappa": [k -> (N,)],
    "tau": [k -> (N,)]}, where kappa_k and tau_k are the signed level-k
    curvature and torsion recovered from frame inner products:
    kappa_k = <psi_{k+1}', psi_{k+2}> and tau_k = <psi_{k+2}', psi_{k+1} x psi_{k+2}>.
    Signed data for level k requires psi up to k+2, so it is filled for
    k <= k_max - 2.
    """
    ts = np.asarray(ts, dtype=float)
    if spherical is None:
        spherical = _looks_spherical(curve)
    order = k_max + 2
    if curve.derivative is None or curve.max_order < order:
        order = min(order, max(4, curve.max_order))
    s_jets = arclength_jets(curve, ts, order)
    raw = _psi_jets(s_jets, k_max)

    signs = [np.ones(len(ts))]  # sign of psi_1
    if continuity:
        signs[0] = _continuity_signs(raw[0][0])
    for k in range(1, len(raw)):
        signs.append(_continuity_signs(raw[k][0]) if continuity else np.ones(len(ts)))

    psi = [None] * (k_max + 1)
    if spherical:
        psi[0] = s_jets[0]
    for k in range(1, k_max + 1):
        psi[k] = raw[k - 1][0] * signs[k - 1][:, None]

    kappa = [None] * (k_max + 1)
    tau = [None] * (k_max + 1)
    for k in range(k_max - 1):
        jk, jk1 = raw[k], raw[k + 1]
        if len(jk) < 2 or len(jk1) < 2:
            continue
        s_here = signs[k] * signs[k + 1]
        kappa[k] = s_here * np.einsum("ij,ij->i", jk[1], jk1[0])
        tau[k] = signs[k] * np.einsum("ij,ij->i", jk1[1], np.cross(jk[0], jk1[0]))
    return {"psi": psi, "kappa": kappa, "tau": tau}


def centrode(curve: Curve3, k: int, t: float, omega: float | None = None) -> DarbouxData:
    """Rotation-axis vector W_k = tau_k T_k + kappa_k B_k of the level-k frame,
    and the shifted axis A_k = W_k - omega N_k when omega is supplied."""
    levels = psi_hierarchy(curve, k + 2, t)
    Tk = levels[k + 1].psi
    Nk = levels[k + 2].psi
    data = levels[k]
    if Tk is None or Nk is None or data.kappa_k is None or data.tau_k is None:
        raise DegenerateLevel(k, f"level-{k} frame unavailable at t={t}")
    Bk = np.cross(Tk, Nk)
    W = data.tau_k * Tk + data.kappa_k * Bk
    A = W - omega * Nk if omega is not None else None
    return DarbouxData(k=k, W_k=W, A_k=A, omega=omega)
