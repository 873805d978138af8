"""Exception types shared across the package."""

from __future__ import annotations


class CurveError(Exception):
    """Base class for all slantchain errors."""


class OutOfDomain(CurveError):
    """Parameter value outside the curve's domain."""


class OrderUnavailable(CurveError):
    """Requested derivative order cannot be produced (no analytic rule and
    the finite-difference stencil does not fit inside the domain)."""


class NonFiniteSample(CurveError):
    """An integrand returned NaN or infinity."""


class IrregularCurve(CurveError):
    """Speed fell below the configured floor where regularity is required."""


class InflectionPoint(CurveError):
    """Curvature vanishes; normal, binormal and torsion are undefined."""


class NotSpherical(CurveError):
    """Curve does not lie on the unit sphere within tolerance."""


class NotUnitSpeed(CurveError):
    """Curve is not parametrized by arc length within tolerance."""


class DegenerateLevel(CurveError):
    """A level of the normalized-derivative hierarchy collapsed."""

    def __init__(self, k: int, message: str | None = None):
        self.k = k
        super().__init__(message or f"hierarchy level {k} is degenerate")


class DepthLimit(CurveError):
    """Chain depth exceeds the configured error budget."""


class BadParams(CurveError):
    """Closed-form family parameters violate their constraints."""


class RangeExceeded(CurveError):
    """Argument outside the supported evaluation range."""


class ResonantParameters(CurveError):
    """A series denominator is too close to zero for these parameters."""
