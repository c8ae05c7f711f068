"""thetalab: a numerical laboratory for twisted Weyl calculus.

Explicit complex-time semigroup kernels for skew-twisted tuples, twisted
convolution on grids, dense operator discretizations and their spectra,
spectral multipliers (Laplace-transform and Bochner-Riesz routes), windowed
Sobolev multiplier norms, and Schatten-class entrywise multiplier scans.
"""

__version__ = "0.1.0"

from .skewform import CanonicalForm, SkewMatrix, canonical_form, spectral_gap
from .specfun import SpecfunContext, envelope_l1_norm, gaussian_envelope
from .kernel import ComplexTime, KernelSpec, k_kernel, p_kernel
from .twistcal import (
    CocycleParams,
    GridField,
    GridGeometry,
    group_apply,
    sigma,
    twisted_convolve,
    weyl_apply,
)

__all__ = [
    "CanonicalForm",
    "CocycleParams",
    "ComplexTime",
    "GridField",
    "GridGeometry",
    "KernelSpec",
    "SkewMatrix",
    "SpecfunContext",
    "canonical_form",
    "envelope_l1_norm",
    "gaussian_envelope",
    "group_apply",
    "k_kernel",
    "p_kernel",
    "sigma",
    "spectral_gap",
    "twisted_convolve",
    "weyl_apply",
]
