"""Schatten-norm experiments for entrywise (Schur) multipliers: Toeplitz
symbols built from scalar multiplier functions, and triangular-truncation
growth as the unbounded contrast case.

Only LOWER bounds on the S^p -> S^p multiplier norm are computed: the max of
||psi o A||_p / ||A||_p over a documented test family.  No tractable
algorithm computes the true norm for general p.
"""

from dataclasses import dataclass

import numpy as np

from .symbols import MultiplierSymbol

SIZE_CAP = 512


@dataclass(frozen=True)
class SchurSymbol:
    """Entrywise multiplier data psi(j, k) on [0, N)^2."""

    psi: object  # callable (j, k) -> complex, vectorized
    N: int

    def matrix(self) -> np.ndarray:
        j, k = np.meshgrid(np.arange(self.N), np.arange(self.N), indexing="ij")
        m = np.asarray(self.psi(j, k), dtype=complex)
        if not np.all(np.isfinite(m)):
            raise ValueError("symbol has non-finite values on the index square")
        return m


def schatten_norm(a: np.ndarray, p: float) -> float:
    """l^p norm of the singular values (operator norm for p = inf)."""
    a = np.asarray(a)
    if a.shape[0] > SIZE_CAP:
        raise ValueError(f"matrix size {a.shape[0]} exceeds cap {SIZE_CAP}")
    sv = np.linalg.svd(a, compute_uv=False)
    if np.isinf(p):
        return float(sv[0])
    if p < 1:
        raise ValueError(f"need p >= 1, got {p}")
    return float(np.sum(sv**p) ** (1.0 / p))


def triangular_symbol(N: int) -> SchurSymbol:
    """psi = 1_{j >= k}: lower-triangular truncation."""
    return SchurSymbol(lambda j, k: (j >= k).astype(float), N)


def toeplitz_symbol(f: MultiplierSymbol, mode: str, N: int,
                    f0: complex | None = None) -> SchurSymbol:
    """psi(j, k) = f((j-k)^2) ('squared') or f(j-k) ('signed').

    The diagonal needs f at 0: taken as the limit from the right when that
    exists, else the supplied f0.  Our convention, recorded, not asserted.
    """
    if mode not in ("squared", "signed"):
        raise ValueError(f"mode must be 'squared' or 'signed', got {mode!r}")

    def diag_value():
        if f0 is not None:
            return complex(f0)
        probes = f.eval(np.array([1e-7, 1e-8, 1e-9]))
        if np.max(np.abs(np.diff(probes))) < 1e-5:
            return complex(probes[-1])
        raise ValueError(
            f"symbol {f.descriptor} has no limit at 0+; supply f0 explicitly"
        )

    d0 = diag_value()

    def psi(j, k):
        diff = j - k
        arg = diff.astype(float) ** 2 if mode == "squared" else diff.astype(float)
        out = np.full(diff.shape, d0, dtype=complex)
        mask = diff != 0
        with np.errstate(invalid="ignore", divide="ignore"):
            out[mask] = f.eval(arg[mask])
        # signed mode feeds negative arguments to f; a symbol that only
        # lives on (0, inf) yields non-finite entries and matrix() raises
        return out

    return SchurSymbol(psi, N)


def hilbert_type_matrix(N: int) -> np.ndarray:
    """H_jk = 1/(j - k + 1/2); the classical triangular-truncation witness."""
    j, k = np.meshgrid(np.arange(N), np.arange(N), indexing="ij")
    return 1.0 / (j - k + 0.5)


def _test_family(sym_matrix: np.ndarray, N: int, trials: int, rng) -> list:
    fam = [hilbert_type_matrix(N), np.ones((N, N))]
    jmax, kmax = np.unravel_index(np.argmax(np.abs(sym_matrix)), sym_matrix.shape)
    spike = np.zeros((N, N))
    spike[jmax, kmax] = 1.0  # rank one at the extremal symbol entry
    fam.append(spike)
    for _ in range(trials):
        fam.append(rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N)))
    return fam


def multiplier_lower_bound(sym: SchurSymbol, p: float, trials: int = 40,
                           seed: int = 42) -> float:
    """max over the test family of ||psi o A||_p / ||A||_p; a lower bound on
    the S^p -> S^p multiplier norm.  Deterministic for a fixed seed."""
    if trials < 1:
        raise ValueError("need at least one trial")
    rng = np.random.default_rng(seed)
    m = sym.matrix()
    best = 0.0
    for a in _test_family(m, sym.N, trials, rng):
        denom = schatten_norm(a, p)
        if denom == 0.0:
            continue
        best = max(best, schatten_norm(m * a, p) / denom)
    return float(best)


def growth_scan(symbol_factory, p: float, sizes=(8, 16, 32, 64, 128),
                trials: int = 40, seed: int = 42) -> dict:
    """Lower bounds across truncation sizes plus a log N regression."""
    sizes = list(sizes)
    bounds = [
        multiplier_lower_bound(symbol_factory(n), p, trials=trials, seed=seed)
        for n in sizes
    ]
    x = np.log(np.asarray(sizes, dtype=float))
    y = np.asarray(bounds)
    a = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(a, y, rcond=None)
    fit = a @ coef
    ss_res = float(np.sum((y - fit) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return {
        "sizes": sizes,
        "bounds": bounds,
        "slope": float(coef[0]),
        "intercept": float(coef[1]),
        "r_squared": r2,
        "p": p,
        "seed": seed,
        "trials": trials,
    }
