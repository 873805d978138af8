"""slantchain: construction and verification of k-slant curve chains.

Two lift operators generate the chains: a spherical lift that maps circles
on the unit sphere to spherical helices, slant curves and beyond, and a
space lift that maps planar curves to helices, constant-precession curves
and higher slant orders. The package provides the curve substrate
(differentiation, quadrature, reparametrization), the frame machinery
(Frenet, spherical frames, the normalized-derivative hierarchy), closed-form
reference curves with a Bessel series stack, a verification harness for
every invariant the construction promises, and a CLI.
"""

from .curve_core import (
    Curve3,
    CumulativeIntegral,
    QuadratureConfig,
    SampledCurve,
    arc_length_reparametrize,
    cumulative_integral,
    eval_derivatives,
    resample,
    sampled_to_curve,
)
from .frames import (
    DarbouxData,
    FrenetData,
    PsiLevel,
    SabbanData,
    centrode,
    frenet_apparatus,
    frenet_samples,
    psi_hierarchy,
    psi_samples,
    sabban_frame,
)
from .gallery import (
    BesselTruncation,
    GalleryParams,
    bessel_j,
    circle,
    circular_helix,
    constant_precession,
    cos_expansion,
    j3_curve,
    j3_partial_series,
    j3_truncation,
    sin_expansion,
    spherical_helix,
)
from .slant_ops import (
    ChainLevel,
    CurvaturePair,
    PhaseVector,
    apply_I,
    apply_J,
    chain_I,
    chain_J,
    negate_then_I,
    predicted_curvatures,
    spherical_weight,
    tangent_indicatrix,
)
from . import errors

__version__ = "0.1.0"
