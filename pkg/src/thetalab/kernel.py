"""Complex-time semigroup kernels for the sum of squares of the universal
tuple, their derived variants, and L1-type quadratures.

The centered kernel on R^n is

    p_z(s) = (4 pi z)^{-n/2} sqrt(det-factor(z)) exp(-quadratic(z, s)/(4 z))

with Re z > 0, evaluated blockwise through the canonical form of Theta; the
two-point kernel attaches the unimodular twist e^{(i/2)<y, Theta x>}.  For
Theta = 0 this is exactly the Gaussian heat kernel.
"""

from dataclasses import dataclass

import numpy as np

from .skewform import SkewMatrix, rotation_block
from .specfun import (
    DomainError,
    SpecfunContext,
    det_sqrt_factor,
    quadratic_form_batch,
)
from .twistcal import GridField, GridGeometry


@dataclass(frozen=True)
class ComplexTime:
    """A complex time z with Re z > 0."""

    z: complex

    def __post_init__(self):
        if complex(self.z).real <= 0:
            raise DomainError(f"need Re z > 0, got z = {self.z}")

    @property
    def argz(self) -> float:
        return float(np.angle(complex(self.z)))


def _as_z(z) -> complex:
    if isinstance(z, ComplexTime):
        return complex(z.z)
    z = complex(z)
    if z.real <= 0:
        raise DomainError(f"need Re z > 0, got z = {z}")
    return z


@dataclass(frozen=True)
class KernelSpec:
    """Theta with its cached canonical/spectral data."""

    theta: SkewMatrix
    ctx: SpecfunContext

    @classmethod
    def for_theta(cls, theta: SkewMatrix) -> "KernelSpec":
        return cls(theta=theta, ctx=SpecfunContext.for_theta(theta))

    @property
    def n(self) -> int:
        return self.theta.dim

    @property
    def alpha(self) -> float:
        return self.ctx.canon.alpha


def p_values(spec: KernelSpec, z, pts) -> np.ndarray:
    """Centered kernel at complex time z over rows of pts."""
    z = _as_z(z)
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    pref = np.exp(-spec.n / 2.0 * np.log(4.0 * np.pi * z))  # principal branch
    quad = quadratic_form_batch(spec.ctx, z, pts)
    return pref * det_sqrt_factor(spec.ctx, z) * np.exp(-quad / (4.0 * z))


def p_kernel(spec: KernelSpec, z, s) -> complex:
    """Centered kernel p_z(s) at a single point."""
    return complex(p_values(spec, z, np.atleast_2d(s))[0])


def k_kernel(spec: KernelSpec, z, x, y) -> complex:
    """Two-point kernel e^{(i/2)<y, Theta x>} p_z(y); modulus |p_z(y)|."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    phase = np.exp(0.5j * float(y @ spec.theta.entries @ x))
    return complex(phase * p_kernel(spec, z, y))


def p_field(spec: KernelSpec, z, geom: GridGeometry) -> GridField:
    """Kernel sampled on a grid (geometry dimension must equal spec.n)."""
    if geom.n != spec.n:
        raise ValueError(f"grid dimension {geom.n} != kernel dimension {spec.n}")
    vals = p_values(spec, z, geom.points())
    return GridField(geom, vals.reshape((geom.N,) * geom.n))


def shifted_values(spec: KernelSpec, z, pts) -> np.ndarray:
    """Gap-compensated kernel e^{alpha z} p_z; its L1 norms stay bounded on
    every proper subsector of the right half plane."""
    z = _as_z(z)
    return np.exp(spec.alpha * z) * p_values(spec, z, pts)


def shifted_kernel(spec: KernelSpec, z, s) -> complex:
    return complex(shifted_values(spec, z, np.atleast_2d(s))[0])


def time_derivative_rotblock(t: float, s) -> complex:
    """d/dt p_t(s) for the basic 2x2 rotation block, t > 0 real:

        (-coth t + |s|^2 / (4 sinh^2 t)) p_t(s)
    """
    if t <= 0:
        raise DomainError(f"need t > 0, got {t}")
    s = np.asarray(s, dtype=float)
    spec = KernelSpec.for_theta(SkewMatrix.from_array(rotation_block(1.0)))
    r2 = float(s @ s)
    return complex(
        (-1.0 / np.tanh(t) + r2 / (4.0 * np.sinh(t) ** 2)) * p_kernel(spec, t, s)
    )


def tensor_split_check(spec: KernelSpec, z, x, y) -> float:
    """|k_z(x, y) - product of per-block two-point kernels|.

    Requires Theta already in canonical block-diagonal layout (2x2 blocks on
    the leading diagonal, zero tail).
    """
    th = spec.theta.entries
    n = spec.n
    blocks = []
    i = 0
    while i + 1 < n and th[i, i + 1] != 0.0:
        blocks.append((i, i + 2))
        i += 2
    tail = (i, n)
    check = np.zeros_like(th)
    for a, b in blocks:
        check[a:b, a:b] = th[a:b, a:b]
    if np.max(np.abs(th - check)) > 1e-14:
        raise ValueError("theta is not in block-diagonal layout")

    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    full = k_kernel(spec, z, x, y)
    prod = 1.0 + 0.0j
    for a, b in blocks:
        sub = KernelSpec.for_theta(SkewMatrix.from_array(th[a:b, a:b]))
        prod *= k_kernel(sub, z, x[a:b], y[a:b])
    if tail[1] > tail[0]:
        a, b = tail
        sub = KernelSpec.for_theta(SkewMatrix.zero(b - a))
        prod *= k_kernel(sub, z, x[a:b], y[a:b])
    return float(abs(full - prod))


# ---------------------------------------------------------------------------
# quadratures


def box_quadrature(fn, n: int, L: float, start: int = 256, rtol: float = 1e-7,
                   max_doublings: int = 3) -> float:
    """integral over [-L, L]^n of fn(pts) by midpoint tensor rule, doubling
    the per-axis resolution until the relative change drops below rtol.
    Gaussian decay makes the rule spectrally accurate."""
    prev = None
    m = start
    for _ in range(max_doublings + 1):
        ax = -L + (np.arange(m) + 0.5) * (2.0 * L / m)
        grids = np.meshgrid(*([ax] * n), indexing="ij")
        pts = np.stack([g.ravel() for g in grids], axis=-1)
        val = float(np.sum(fn(pts)).real) * (2.0 * L / m) ** n
        if prev is not None and abs(val - prev) <= rtol * max(abs(val), 1e-300):
            return val
        prev = val
        m *= 2
    return prev


def quadrature_box_size(spec: KernelSpec, z) -> float:
    """Box half-width such that every Gaussian tail of |p_z| is negligible.

    The modulus decays per block like e^{-rate |y|^2} with
    rate = Re(a cot-h(a z))/4, and like e^{-Re(1/(4z)) |y''|^2} on the zero
    block; the box is sized so the slowest rate still reaches e^{-34}.
    (A fixed box independent of Im z truncates real mass for strongly
    oscillatory times.)
    """
    z = _as_z(z)
    rates = [z.real / (4.0 * abs(z) ** 2)] if (
        spec.n > 2 * spec.ctx.canon.block_count
    ) else []
    for a in spec.ctx.canon.alphas:
        rates.append(float(np.real(a / np.tanh(a * z))) / 4.0)
    return max(8.0, float(np.sqrt(34.0 / min(rates))))


def p_l1_norm(spec: KernelSpec, z, L: float | None = None) -> float:
    """||p_z||_L1 by quadrature."""
    z = _as_z(z)
    L = quadrature_box_size(spec, z) if L is None else L
    return box_quadrature(lambda pts: np.abs(p_values(spec, z, pts)), spec.n, L)


def shifted_l1_norm(spec: KernelSpec, z, L: float | None = None) -> float:
    """||e^{alpha z} p_z||_L1 by quadrature."""
    z = _as_z(z)
    return float(np.exp(spec.alpha * z.real)) * p_l1_norm(spec, z, L)


def shifted_l1_closed_form(spec: KernelSpec, z) -> float:
    """Exact ||e^{alpha z} p_z||_L1 from the blockwise Gaussian integrals:

        e^{alpha Re z} * prod_j ||g_{a_j z}||_L1 * cos(arg z)^{-(n-2k)/2}
    """
    from .specfun import envelope_l1_norm

    z = _as_z(z)
    out = float(np.exp(spec.alpha * z.real))
    canon = spec.ctx.canon
    for a in canon.alphas:
        out *= envelope_l1_norm(a * z)
    tail = spec.n - 2 * canon.block_count
    if tail:
        out *= float(np.cos(np.angle(z)) ** (-tail / 2.0))
    return out


def derivative_plus_l1(t: float, rmax: float = 40.0, m: int = 20000) -> float:
    """||d/dt p_t + p_t||_L1(R^2) for the basic rotation block, by radial
    quadrature of |(1 - coth t) + r^2/(4 sinh^2 t)| p_t(r)."""
    if t <= 0:
        raise DomainError(f"need t > 0, got {t}")
    r = (np.arange(m) + 0.5) * (rmax / m)
    coth = 1.0 / np.tanh(t)
    prof = np.exp(-coth / 4.0 * r**2) / (4.0 * np.pi * np.sinh(t))
    integrand = np.abs((1.0 - coth) + r**2 / (4.0 * np.sinh(t) ** 2)) * prof
    return float(2.0 * np.pi * np.sum(integrand * r) * (rmax / m))


def derivative_decay_slope(t_lo: float = 1.0, t_hi: float = 3.0, num: int = 9) -> float:
    """Least-squares slope of log ||d/dt p_t + p_t||_L1 against t."""
    ts = np.linspace(t_lo, t_hi, num)
    logs = np.log([derivative_plus_l1(t) for t in ts])
    a = np.vstack([ts, np.ones_like(ts)]).T
    slope, _ = np.linalg.lstsq(a, logs, rcond=None)[0]
    return float(slope)


def sector_l1_scan(spec: KernelSpec, zs=None, quadrature: bool = False) -> dict:
    """||e^{alpha z} p_z||_L1 over a sector sample grid.

    Closed form by default; quadrature=True recomputes the norms by box
    quadrature (slower, used for cross-validation).
    """
    from .specfun import sector_grid

    if zs is None:
        zs = sector_grid(max_arg=0.4 * np.pi)
    fn = shifted_l1_norm if quadrature else shifted_l1_closed_form
    vals = np.array([fn(spec, z) for z in zs])
    i = int(np.argmax(vals))
    return {"max": float(vals[i]), "argmax_z": complex(zs[i]), "values": vals, "zs": zs}
