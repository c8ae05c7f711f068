"""Scalar and blockwise special functions entering the semigroup kernels.

The two meromorphic scalars are z/sin(z) and z/tan(z), extended by 1 at the
removable singularity z = 0.  Their matrix versions at z*Theta reduce per
canonical 2x2 block to the scalar at i*z*a_j, so the determinant square root
and the quadratic form are computed blockwise without any branch tracking:
each factor i*z*a_j/sin(i*z*a_j) = z*a_j/sinh(z*a_j) stays off (-inf, 0]
for Re z > 0.
"""

from dataclasses import dataclass

import numpy as np

from .skewform import CanonicalForm, SkewMatrix, canonical_form

SERIES_RADIUS = 1e-4   # below this |z|, evaluate by series to dodge cancellation
POLE_TOL = 1e-300


class PoleError(ZeroDivisionError):
    pass


class DomainError(ValueError):
    pass


ASYMPTOTIC_IMAG = 300.0  # |sin z| ~ e^{|Im z|}/2 overflows past ~709


def z_over_sin(z: complex) -> complex:
    """z/sin(z), = 1 at z = 0.  Even function with poles at k*pi, k != 0."""
    z = complex(z)
    if abs(z) < SERIES_RADIUS:
        return 1.0 + z * z / 6.0 + 7.0 * z**4 / 360.0
    if abs(z.imag) > ASYMPTOTIC_IMAG:
        return 0.0  # |z/sin z| < |z| e^{-|Im z|} underflows
    s = np.sin(z)
    if abs(s) < POLE_TOL:
        raise PoleError(f"sin({z}) ~ 0: too close to a pole")
    return z / s


def z_over_tan(z: complex) -> complex:
    """z/tan(z), = 1 at z = 0.  Even function with poles at k*pi, k != 0."""
    z = complex(z)
    if abs(z) < SERIES_RADIUS:
        return 1.0 - z * z / 3.0 - z**4 / 45.0
    if abs(z.imag) > ASYMPTOTIC_IMAG:
        return -1j * z * np.sign(z.imag)  # cot(z) -> -i sign(Im z)
    s = np.sin(z)
    if abs(s) < POLE_TOL:
        raise PoleError(f"sin({z}) ~ 0: too close to a pole")
    return z * np.cos(z) / s


@dataclass(frozen=True)
class SpecfunContext:
    """A skew matrix with its canonical form cached."""

    theta: SkewMatrix
    canon: CanonicalForm

    @classmethod
    def for_theta(cls, theta: SkewMatrix) -> "SpecfunContext":
        return cls(theta=theta, canon=canonical_form(theta))

    @property
    def dim(self) -> int:
        return self.theta.dim


def det_sqrt_factor(ctx: SpecfunContext, z: complex) -> complex:
    """sqrt(det of z*Theta applied to z/sin(z)), computed blockwise.

    Equals prod_j z*a_j/sinh(z*a_j); the zero block contributes 1.
    Continuous on Re z > 0.
    """
    if z.real <= 0:
        raise DomainError(f"need Re z > 0, got z = {z}")
    out = 1.0 + 0.0j
    for a in ctx.canon.alphas:
        out *= z_over_sin(1j * z * a)
    return out


def quadratic_form(ctx: SpecfunContext, z: complex, s) -> complex:
    """<R(z*Theta)s, s> with R = z/tan(z), via the canonical form.

    Per 2x2 block the matrix is z*a_j*coth(z*a_j) times the identity; the
    zero block contributes |s''|^2.
    """
    if z.real <= 0:
        raise DomainError(f"need Re z > 0, got z = {z}")
    s = np.asarray(s, dtype=float)
    y = ctx.canon.O @ s
    k = ctx.canon.block_count
    out = 0.0 + 0.0j
    for j, a in enumerate(ctx.canon.alphas):
        out += z_over_tan(1j * z * a) * (y[2 * j] ** 2 + y[2 * j + 1] ** 2)
    out += np.sum(y[2 * k :] ** 2)
    return out


def quadratic_form_batch(ctx: SpecfunContext, z: complex, pts: np.ndarray) -> np.ndarray:
    """quadratic_form over rows of pts, vectorized."""
    if z.real <= 0:
        raise DomainError(f"need Re z > 0, got z = {z}")
    y = pts @ ctx.canon.O.T
    k = ctx.canon.block_count
    out = np.zeros(len(pts), dtype=complex)
    for j, a in enumerate(ctx.canon.alphas):
        out += z_over_tan(1j * z * a) * (y[:, 2 * j] ** 2 + y[:, 2 * j + 1] ** 2)
    out += np.sum(y[:, 2 * k :] ** 2, axis=1)
    return out


def gaussian_envelope(z: complex, y) -> np.ndarray:
    """The dominating 1-D profile 1/sqrt(4*pi*|sinh z|) * exp(-Re(coth z)/4 * y^2).

    Positive, even, decreasing on [0, inf); Re coth z > 0 whenever Re z > 0.
    The product envelope(z, y1)*envelope(z, y2) dominates |p_z| for the basic
    2x2 block.
    """
    z = complex(z)
    if z.real <= 0:
        raise DomainError(f"need Re z > 0, got z = {z}")
    c = np.real(1.0 / np.tanh(z))
    return np.exp(-c / 4.0 * np.asarray(y, dtype=float) ** 2) / np.sqrt(
        4.0 * np.pi * abs(np.sinh(z))
    )


def envelope_derivative(z: complex, y) -> np.ndarray:
    """d/dy of gaussian_envelope(z, .); negative on (0, inf)."""
    z = complex(z)
    c = np.real(1.0 / np.tanh(z))
    return -c / 2.0 * np.asarray(y, dtype=float) * gaussian_envelope(z, y)


def envelope_l1_norm(z: complex) -> float:
    """Exact L1(R^2) norm of the product envelope.

    (int envelope dy)^2 = 1/(|sinh z| * Re coth z) = |sinh z| /
    (sinh(Re z) * cosh(Re z)); the identity Re coth z =
    sinh(Re z)cosh(Re z)/|sinh z|^2 turns the Gaussian integral into this
    closed form.
    """
    z = complex(z)
    if z.real <= 0:
        raise DomainError(f"need Re z > 0, got z = {z}")
    x = z.real
    return float(abs(np.sinh(z)) / (np.sinh(x) * np.cosh(x)))


def sector_grid(
    radial: int = 20,
    angular: int = 17,
    r_range: tuple = (0.05, 20.0),
    max_arg: float = 0.45 * np.pi,
) -> np.ndarray:
    """Log-radial x angular sample grid of the open right half plane."""
    rs = np.geomspace(r_range[0], r_range[1], radial)
    phis = np.linspace(-max_arg, max_arg, angular)
    return np.array([r * np.exp(1j * p) for r in rs for p in phis])


def envelope_weight_scan(zs=None) -> dict:
    """max over z samples of cos(arg z) * e^{Re z} * ||g_z||_L1.

    A finite max over the scan is the desk-scale stand-in for the uniform
    bound on the weighted envelope norms over the right half plane.
    """
    if zs is None:
        zs = sector_grid()
    vals = np.array(
        [np.cos(np.angle(z)) * np.exp(z.real) * envelope_l1_norm(z) for z in zs]
    )
    i = int(np.argmax(vals))
    return {"max": float(vals[i]), "argmax_z": complex(zs[i]), "values": vals, "zs": zs}
