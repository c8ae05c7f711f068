"""Cocycle, twisted convolution and the projective group action on grids.

Fields live on a uniform box grid [-L, L)^n with periodic indexing and
row-major flat ordering.  The twisting phase e^{-(i/2)<x, Theta y>} always
uses the true (unwrapped) coordinates of both points; only the difference
x - y used to index the second factor wraps.  The continuum has no
periodicity, so fields under test must be negligible near the boundary
(a warning fires when more than BOUNDARY_MASS_TOL of the mass sits within
4h of it).  All grid and periodization choices are artifact decisions.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .skewform import SkewMatrix

BOUNDARY_MASS_TOL = 1e-8
ON_GRID_ATOL = 1e-9
CONV_CHUNK = 256        # output rows per chunk in the O(M^2) convolution
DENSE_OPERATOR_CAP = 4096


class GeometryError(ValueError):
    pass


class OffGridError(ValueError):
    """Translation amount is not an integer multiple of the spacing."""


class BoundaryMassWarning(UserWarning):
    pass


@dataclass(frozen=True)
class GridGeometry:
    """Uniform grid on [-L, L)^n, N points per axis, spacing h = 2L/N."""

    n: int
    N: int
    L: float

    def __post_init__(self):
        if self.n < 1 or self.N < 2 or self.L <= 0:
            raise GeometryError(f"bad geometry n={self.n} N={self.N} L={self.L}")

    @property
    def h(self) -> float:
        return 2.0 * self.L / self.N

    @property
    def size(self) -> int:
        return self.N**self.n

    def axis(self) -> np.ndarray:
        return -self.L + self.h * np.arange(self.N)

    def points(self) -> np.ndarray:
        """All grid points, shape (N^n, n), row-major flat order."""
        grids = np.meshgrid(*([self.axis()] * self.n), indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=-1)

    @property
    def origin_index(self) -> tuple:
        # coordinate 0 sits at index N/2 on each axis
        if self.N % 2:
            raise GeometryError("origin is on-grid only for even N")
        return (self.N // 2,) * self.n


@dataclass
class GridField:
    """Complex samples on a GridGeometry; values shape (N,)*n, row-major."""

    geom: GridGeometry
    values: np.ndarray

    def __post_init__(self):
        expect = (self.geom.N,) * self.geom.n
        if self.values.shape != expect:
            raise GeometryError(
                f"values shape {self.values.shape} != geometry shape {expect}"
            )
        self.values = np.ascontiguousarray(self.values, dtype=complex)

    @classmethod
    def from_function(cls, geom: GridGeometry, fn) -> "GridField":
        pts = geom.points()
        vals = np.asarray(fn(pts), dtype=complex).reshape((geom.N,) * geom.n)
        return cls(geom, vals)

    @classmethod
    def zeros(cls, geom: GridGeometry) -> "GridField":
        return cls(geom, np.zeros((geom.N,) * geom.n, dtype=complex))

    def copy(self) -> "GridField":
        return GridField(self.geom, self.values.copy())

    def lp_norm(self, p: float) -> float:
        """h^n-weighted discrete L^p norm (max norm for p = inf)."""
        a = np.abs(self.values)
        if np.isinf(p):
            return float(a.max())
        return float((self.geom.h**self.geom.n * np.sum(a**p)) ** (1.0 / p))

    def boundary_mass_fraction(self, depth: int = 4) -> float:
        a = np.abs(self.values)
        total = a.sum()
        if total == 0:
            return 0.0
        mask = np.ones_like(a, dtype=bool)
        for ax in range(self.geom.n):
            sl = [slice(None)] * self.geom.n
            sl[ax] = slice(depth, self.geom.N - depth)
            inner = np.zeros_like(mask)
            inner[tuple(sl)] = True
            mask &= inner
        return float(a[~mask].sum() / total)


def _check_boundary(f: GridField, what: str):
    frac = f.boundary_mass_fraction()
    if frac > BOUNDARY_MASS_TOL:
        warnings.warn(
            f"{what}: {frac:.2e} of the field mass sits within 4h of the "
            "boundary; periodic wrap will pollute the result",
            BoundaryMassWarning,
            stacklevel=3,
        )


@dataclass(frozen=True)
class CocycleParams:
    theta: SkewMatrix

    @property
    def dim(self) -> int:
        return self.theta.dim


def sigma(c: CocycleParams, s, t) -> complex:
    """The unimodular 2-cocycle e^{(i/2)<s, Theta t>}."""
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    return complex(np.exp(0.5j * float(s @ c.theta.entries @ t)))


def _phase_tables(c: CocycleParams, geom: GridGeometry):
    """Per nonzero Theta_jk entry, the N x N table e^{-(i/2)Theta_jk x_j y_k}.

    The full twisting phase is the product of these over nonzero entries;
    building tables avoids M^2 complex exponentials.
    """
    ax = geom.axis()
    tables = []
    th = c.theta.entries
    for j in range(geom.n):
        for k in range(geom.n):
            if th[j, k] != 0.0:
                tables.append((j, k, np.exp(-0.5j * th[j, k] * np.outer(ax, ax))))
    return tables


def twisted_convolve(c: CocycleParams, f: GridField, g: GridField) -> GridField:
    """Direct O(M^2) quadrature of the twisted convolution on the grid:

        out(x) = h^n sum_y f(y) g(x - y) e^{-(i/2)<x, Theta y>}

    x - y wraps periodically; the phase uses true coordinates.  For
    Theta = 0 this is plain (circular) convolution.
    """
    if f.geom != g.geom:
        raise GeometryError("fields must share grid geometry")
    if c.dim != f.geom.n:
        raise GeometryError("cocycle dimension does not match the grid")
    _check_boundary(f, "twisted_convolve(f)")
    _check_boundary(g, "twisted_convolve(g)")

    geom = f.geom
    n, N, M = geom.n, geom.N, geom.size
    fflat = f.values.ravel()
    gvals = g.values
    tables = _phase_tables(c, geom)

    ymulti = np.unravel_index(np.arange(M), (N,) * n)
    out = np.empty(M, dtype=complex)
    half = N // 2  # coordinate 0 lives at index N/2 on each axis
    for start in range(0, M, CONV_CHUNK):
        stop = min(start + CONV_CHUNK, M)
        xmulti = np.unravel_index(np.arange(start, stop), (N,) * n)
        diff = tuple(
            (xmulti[ax][:, None] - ymulti[ax][None, :] + half) % N
            for ax in range(n)
        )
        block = gvals[diff] * fflat[None, :]  # (chunk, M): f(y) g(x - y)
        for j, k, tab in tables:
            block *= tab[xmulti[j][:, None], ymulti[k][None, :]]
        out[start:stop] = block.sum(axis=1)
    out *= geom.h**n
    return GridField(geom, out.reshape((N,) * n))


def plain_convolve_fft(f: GridField, g: GridField) -> GridField:
    """FFT circular convolution; valid fast path only for Theta = 0."""
    if f.geom != g.geom:
        raise GeometryError("fields must share grid geometry")
    geom = f.geom
    # FFT convolution indexes differences from index 0; the coordinate
    # difference 0 lives at index N/2, so shift the output accordingly
    fv = np.fft.ifftn(np.fft.fftn(f.values) * np.fft.fftn(g.values))
    fv = np.roll(fv, (-(geom.N // 2),) * geom.n, axis=tuple(range(geom.n)))
    return GridField(geom, geom.h**geom.n * fv)


def _steps(geom: GridGeometry, t) -> np.ndarray:
    t = np.atleast_1d(np.asarray(t, dtype=float))
    steps = np.rint(t / geom.h)
    if np.max(np.abs(t - steps * geom.h)) > ON_GRID_ATOL * max(1.0, geom.h):
        raise OffGridError(
            f"translation {t} is not an integer multiple of h = {geom.h}; "
            "snap or interpolate explicitly"
        )
    return steps.astype(int)


def group_apply(c: CocycleParams, t, f: GridField) -> GridField:
    """The projective group action e^{(i/2)<t, Theta x>} f(x - t).

    Exact modulation-translation; preserves every discrete l^p norm.  t must
    be on-grid.  The phase uses the true coordinate of the output point, so
    group-law identities hold to machine precision wherever the translated
    support does not wrap around the box.
    """
    geom = f.geom
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if t.shape != (geom.n,):
        raise GeometryError(f"translation has shape {t.shape}, grid is {geom.n}-dim")
    steps = _steps(geom, t)
    shifted = np.roll(f.values, shift=tuple(steps), axis=tuple(range(geom.n)))
    w = c.theta.entries @ t  # <t, Theta x> = sum_j -(Theta t)_j x_j
    ax = geom.axis()
    out = shifted
    for j in range(geom.n):
        if w[j] != 0.0:
            shape = [1] * geom.n
            shape[j] = geom.N
            out = out * np.exp(-0.5j * w[j] * ax).reshape(shape)
    return GridField(geom, np.ascontiguousarray(out))


def weyl_apply(c: CocycleParams, a_hat: GridField, f: GridField) -> GridField:
    """Apply the quantized symbol with Fourier data a_hat:

        out = (2 pi)^{-n/2} h^n sum_u a_hat(u) * group_apply(u, f)

    which coincides with (2 pi)^{-n/2} * twisted_convolve(a_hat, f).
    """
    if a_hat.geom != f.geom:
        raise GeometryError("fields must share grid geometry")
    conv = twisted_convolve(c, a_hat, f)
    conv.values *= (2.0 * np.pi) ** (-f.geom.n / 2.0)
    return conv


def weyl_apply_direct(c: CocycleParams, a_hat: GridField, f: GridField) -> GridField:
    """Same operator as weyl_apply, summed term by term over group elements.

    O(M) group actions; the literal form of the definition, kept for
    cross-checking the convolution identity.
    """
    geom = f.geom
    out = np.zeros_like(f.values)
    pts = geom.points()
    avals = a_hat.values.ravel()
    for u, a in zip(pts, avals):
        if a == 0.0:
            continue
        out += a * group_apply(c, u, f).values
    out *= geom.h**geom.n * (2.0 * np.pi) ** (-geom.n / 2.0)
    return GridField(geom, out)


def weyl_operator_matrix(c: CocycleParams, a_hat: GridField) -> np.ndarray:
    """Dense matrix of f -> weyl_apply(c, a_hat, f) on the flat grid.

    Entry (x, w) is (2 pi)^{-n/2} h^n a_hat(y) e^{-(i/2)<x, Theta y>} where
    y is the grid point with index (x - w) mod N per axis.  Desk scale only.
    """
    geom = a_hat.geom
    n, N, M = geom.n, geom.N, geom.size
    if M > DENSE_OPERATOR_CAP:
        raise GeometryError(
            f"grid has {M} points; dense operators are capped at "
            f"{DENSE_OPERATOR_CAP} (use a smaller N)"
        )
    avals = a_hat.values
    tables = _phase_tables(c, geom)
    wmulti = np.unravel_index(np.arange(M), (N,) * n)
    mat = np.empty((M, M), dtype=complex)
    half = N // 2
    for start in range(0, M, CONV_CHUNK):
        stop = min(start + CONV_CHUNK, M)
        xmulti = np.unravel_index(np.arange(start, stop), (N,) * n)
        ymulti = tuple(
            (xmulti[ax][:, None] - wmulti[ax][None, :] + half) % N
            for ax in range(n)
        )
        block = avals[ymulti].astype(complex)
        for j, k, tab in tables:
            block *= tab[xmulti[j][:, None], ymulti[k]]
        mat[start:stop] = block
    mat *= geom.h**n * (2.0 * np.pi) ** (-n / 2.0)
    return mat


def operator_norm_2(mat: np.ndarray) -> float:
    """Largest singular value by dense LAPACK SVD.

    Iterative solvers are a trap here: the twisted-convolution operators of
    interest have tightly clustered top singular bands (the transference
    comparisons sit at near-equality), which stalls ARPACK-style k=1 solves.
    Desk-scale sizes make the dense solve cheap and guaranteed to finish.
    """
    return float(np.linalg.svd(mat, compute_uv=False)[0])


def transference_check(
    c: CocycleParams, a_hat: GridField, system, rtol: float = 1e-6
) -> dict:
    """Compare the quantized-symbol norm on a concrete finite Weyl system
    against the twisted-convolution norm on the grid (p = 2 both sides):

        lhs = || (2 pi)^{-n/2} h^n sum_u a_hat(u) E(u) ||_2
        rhs = M^2 * || f -> weyl_apply(a_hat, f) ||_2

    `system` provides exp_matrix(u) (the group element as a dense matrix on
    its own space), dim and group_bound M.  The transference inequality
    asserts lhs <= rhs up to the stated relative slack.
    """
    geom = a_hat.geom
    pts = geom.points()
    avals = a_hat.values.ravel()
    dim = system.dim
    acc = np.zeros((dim, dim), dtype=complex)
    for u, a in zip(pts, avals):
        if a == 0.0:
            continue
        acc += a * system.exp_matrix(u)
    acc *= geom.h**geom.n * (2.0 * np.pi) ** (-geom.n / 2.0)
    lhs = float(np.linalg.norm(acc, 2))

    rhs_norm = operator_norm_2(weyl_operator_matrix(c, a_hat))
    m = float(system.group_bound)
    rhs = m * m * rhs_norm
    return {"lhs": lhs, "rhs": rhs, "group_bound": m, "ok": lhs <= rhs * (1.0 + rtol)}
