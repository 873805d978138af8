"""Derivative-array ("jet") arithmetic.

A jet stores the values ``[f, f', f'', ...]`` of a quantity and its parameter
derivatives at one or many evaluation points; axis 0 is always the derivative
order. Scalar jets have shape ``(m+1, ...)`` and vector jets ``(m+1, ..., 3)``.
The rules below (Leibniz products, reciprocal, square root, sine/cosine of a
jet) are exact, so derivatives propagate through the operator recursions
without truncation error.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "jshift",
    "jmul",
    "jdot",
    "jcross",
    "jdet3",
    "jrecip",
    "jsqrt",
    "jnorm",
    "junit",
    "jsincos",
    "jsign_abs",
]


def _binom(n: int, k: int) -> float:
    return float(math.comb(n, k))


def jshift(a: np.ndarray, orders: int = 1) -> np.ndarray:
    """Jet of the derivative: drop the lowest `orders` entries."""
    return a[orders:]


def _pair(a, b):
    """Broadcast a scalar jet against a vector jet by appending an axis."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim + 1 == b.ndim:
        a = a[..., None]
    elif b.ndim + 1 == a.ndim:
        b = b[..., None]
    return a, b


def jmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Leibniz product of two jets, truncated to the shorter one."""
    a, b = _pair(a, b)
    m = min(len(a), len(b))
    parts = []
    for n in range(m):
        acc = 0.0
        for k in range(n + 1):
            acc = acc + _binom(n, k) * a[k] * b[n - k]
        parts.append(acc)
    return np.stack(parts, axis=0)


def jdot(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Leibniz rule for the Euclidean inner product of two vector jets."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    m = min(len(u), len(v))
    parts = []
    for n in range(m):
        acc = 0.0
        for k in range(n + 1):
            acc = acc + _binom(n, k) * np.sum(u[k] * v[n - k], axis=-1)
        parts.append(acc)
    return np.stack(parts, axis=0)


def jcross(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Leibniz rule for the cross product of two vector jets."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    m = min(len(u), len(v))
    parts = []
    for n in range(m):
        acc = 0.0
        for k in range(n + 1):
            acc = acc + _binom(n, k) * np.cross(u[k], v[n - k])
        parts.append(acc)
    return np.stack(parts, axis=0)


def jdet3(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Jet of det(a, b, c) = <a x b, c>."""
    return jdot(jcross(a, b), c)


def jrecip(a: np.ndarray) -> np.ndarray:
    """Jet of 1/a. Requires a[0] bounded away from zero."""
    a = np.asarray(a, dtype=float)
    out = np.zeros_like(a)
    out[0] = 1.0 / a[0]
    for n in range(1, len(a)):
        acc = 0.0
        for k in range(1, n + 1):
            acc = acc + _binom(n, k) * a[k] * out[n - k]
        out[n] = -acc / a[0]
    return out


def jsqrt(a: np.ndarray) -> np.ndarray:
    """Jet of sqrt(a). Requires a[0] > 0."""
    a = np.asarray(a, dtype=float)
    out = np.zeros_like(a)
    out[0] = np.sqrt(a[0])
    for n in range(1, len(a)):
        acc = 0.0
        for k in range(1, n):
            acc = acc + _binom(n, k) * out[k] * out[n - k]
        out[n] = (a[n] - acc) / (2.0 * out[0])
    return out


def jnorm(u: np.ndarray) -> np.ndarray:
    """Jet of the Euclidean norm of a vector jet."""
    return jsqrt(jdot(u, u))


def junit(u: np.ndarray) -> np.ndarray:
    """Jet of u/|u|."""
    return jmul(u, jrecip(jnorm(u)))


def jsincos(theta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Jets of sin(theta) and cos(theta) for a scalar jet theta."""
    theta = np.asarray(theta, dtype=float)
    s = np.zeros_like(theta)
    c = np.zeros_like(theta)
    s[0] = np.sin(theta[0])
    c[0] = np.cos(theta[0])
    for n in range(1, len(theta)):
        sa = 0.0
        ca = 0.0
        for k in range(n):
            w = _binom(n - 1, k)
            sa = sa + w * c[k] * theta[n - k]
            ca = ca + w * s[k] * theta[n - k]
        s[n] = sa
        c[n] = -ca
    return s, c


def jsign_abs(a: np.ndarray) -> np.ndarray:
    """Jet of |a| away from zeros of a: sign(a[0]) * a."""
    a = np.asarray(a, dtype=float)
    return np.sign(a[0]) * a
