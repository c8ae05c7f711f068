"""Windowed Sobolev norms of multiplier symbols, multiplier-condition
scans, and the calculus-order formula.

The windowed norm is sup over dyadic scales t of the Sobolev W^{s,2} norm
of x -> eta(x) f(t x), with a fixed smooth bump eta supported on [1/2, 2].
Different bumps give equivalent norms; the values reported here are tied to
THIS eta and are representatives of that equivalence class.
"""

from dataclasses import dataclass, replace

import numpy as np

from .symbols import MultiplierSymbol

# peak-normalized smooth bump on (1/2, 2): exp(1/((x-1/2)(x-2)) + 16/9)
_ETA_PEAK_EXPONENT = 16.0 / 9.0
DIVERGENCE_GROWTH = 0.05   # two successive refinements growing past this flag
CONVERGENCE_RTOL = 1e-3


def eta(x) -> np.ndarray:
    """Fixed C-infinity bump, support [1/2, 2], peak value 1 at x = 5/4."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    inside = (x > 0.5) & (x < 2.0)
    xi = x[inside]
    out[inside] = np.exp(1.0 / ((xi - 0.5) * (xi - 2.0)) + _ETA_PEAK_EXPONENT)
    return out


def eta_derivative(x) -> np.ndarray:
    """Analytic derivative of eta (quadrature oracle helper)."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    inside = (x > 0.5) & (x < 2.0)
    xi = x[inside]
    q = (xi - 0.5) * (xi - 2.0)
    out[inside] = eta(xi) * (-(2.0 * xi - 2.5) / q**2)
    return out


def sobolev_norm(samples, spacing: float, s: float) -> float:
    """Discrete Plancherel form of the Sobolev norm:

        ( sum_k |f_hat(xi_k)|^2 (1 + xi_k^2)^s  d xi )^{1/2}

    for samples of a function supported inside the sampled window.  s = 0
    reduces to the L2 norm.
    """
    samples = np.asarray(samples, dtype=complex)
    m = len(samples)
    if m == 0:
        raise ValueError("empty sample window")
    fhat = np.fft.fft(samples) * spacing / np.sqrt(2.0 * np.pi)
    xi = 2.0 * np.pi * np.fft.fftfreq(m, d=spacing)
    dxi = 2.0 * np.pi / (m * spacing)
    return float(np.sqrt(np.sum(np.abs(fhat) ** 2 * (1.0 + xi**2) ** s) * dxi))


@dataclass(frozen=True)
class HormConfig:
    s: float
    J: int = 12          # scales cover [2^-J, 2^J]
    q: int = 4           # windows per octave
    M: int = 256         # samples per window
    x_lo: float = 0.25   # window sampling range (eta vanishes outside [.5, 2])
    x_hi: float = 2.25
    max_refinements: int = 5

    def __post_init__(self):
        if self.s <= 0:
            raise ValueError(f"need s > 0, got {self.s}")

    def tgrid(self) -> np.ndarray:
        j = np.arange(-self.J * self.q, self.J * self.q + 1)
        return 2.0 ** (j / self.q)


@dataclass
class HormResult:
    norm: float
    converged: bool
    diverged: bool
    windows: int
    history: list

    def __float__(self):
        return self.norm


def window_norm(f: MultiplierSymbol, t: float, cfg: HormConfig) -> float:
    """W^{s,2} norm of x -> eta(x) f(t x) over the sampling window."""
    x = np.linspace(cfg.x_lo, cfg.x_hi, cfg.M, endpoint=False)
    w = eta(x) * f.eval(t * x)
    if not np.all(np.isfinite(w)):
        return np.inf
    return sobolev_norm(w, x[1] - x[0], cfg.s)


def _window_norms(f: MultiplierSymbol, cfg: HormConfig) -> dict:
    return {float(t): window_norm(f, t, cfg) for t in cfg.tgrid()}


def hormander_norm(f: MultiplierSymbol, cfg: HormConfig) -> HormResult:
    """sup over dyadic scales of the windowed Sobolev norm, refined by
    doubling both the scale resolution q and the window sampling M until
    every window stabilizes.

    The sup is infinite as soon as a single window norm is; a window whose
    norm keeps growing by more than DIVERGENCE_GROWTH across two successive
    refinements is treated as divergent even while the running max sits at
    another scale (kink symbols plateau elsewhere long before the singular
    window overtakes them).
    """
    norms = _window_norms(f, cfg)
    history = [max(norms.values())]
    prev_growth: dict = {}
    converged = False
    for _ in range(cfg.max_refinements):
        cfg = replace(cfg, q=cfg.q * 2, M=cfg.M * 2)
        new_norms = _window_norms(f, cfg)
        history.append(max(new_norms.values()))
        if not np.isfinite(history[-1]):
            return HormResult(np.inf, False, True, len(cfg.tgrid()), history)
        floor = 1e-3 * history[-1]  # ignore relative growth of negligible windows
        growth = {
            t: (new_norms[t] - v) / max(v, 1e-300)
            for t, v in norms.items()
            if t in new_norms and new_norms[t] > floor
        }
        for t, g in growth.items():
            if g > DIVERGENCE_GROWTH and prev_growth.get(t, 0.0) > DIVERGENCE_GROWTH:
                return HormResult(np.inf, False, True, len(cfg.tgrid()), history)
        norms, prev_growth = new_norms, growth
        if max(abs(g) for g in growth.values()) < CONVERGENCE_RTOL and \
                abs(history[-1] - history[-2]) < CONVERGENCE_RTOL * history[-1]:
            converged = True
            break
    return HormResult(history[-1], converged, False, len(cfg.tgrid()), history)


def mihlin_check(f: MultiplierSymbol, order: int, lam_lo: float = 1e-3,
                 lam_hi: float = 1e3, samples: int = 4097) -> dict:
    """Informational scan of multiplier-condition quantities on (0, inf):

      pointwise_k : sup over the grid of lambda^k |f^(k)(lambda)|
      dyadic_k    : per dyadic R, R^{2k-1} int_R^{2R} |f^(k)|^2

    Derivatives are central differences on a log-spaced grid.  No pass/fail;
    callers inspect trends (a bounded family has flat dyadic rows).
    """
    u = np.linspace(np.log(lam_lo), np.log(lam_hi), samples)
    du = u[1] - u[0]
    lam = np.exp(u)
    vals = np.asarray(f.eval(lam), dtype=complex)

    # derivatives w.r.t. lambda via d/dlam = e^{-u} d/du
    derivs = [vals]
    g = vals
    for _ in range(order):
        g = np.gradient(g, du, edge_order=2) / lam
        derivs.append(g)

    rs = 2.0 ** np.arange(
        int(np.ceil(np.log2(lam_lo * 4))), int(np.floor(np.log2(lam_hi / 4)))
    )
    report = {"pointwise": {}, "dyadic": {}, "dyadic_by_R": {}}
    for k in range(order + 1):
        report["pointwise"][k] = float(np.max(lam**k * np.abs(derivs[k])))
        rows = []
        for r in rs:
            mask = (lam >= r) & (lam <= 2.0 * r)
            integrand = np.abs(derivs[k][mask]) ** 2
            integral = float(np.sum(integrand * lam[mask]) * du)  # dlam = lam du
            rows.append(r ** (2 * k - 1) * integral)
        report["dyadic"][k] = float(np.max(rows))
        report["dyadic_by_R"][k] = (rs.copy(), np.array(rows))
    return report


def required_order(p: float, d: int) -> float:
    """Interpolated smoothness order sufficient for the L^p calculus of a
    d-dimensional oscillator:

        (2/p - 1)(d + 1/2) + 1/p'   for p <= 2
        (2/p' - 1)(d + 1/2) + 1/p   for p >= 2

    Tends to d + 1/2 at the endpoints and to 1/2 at p = 2.
    """
    if not 1.0 < p < np.inf:
        raise ValueError(f"need 1 < p < inf, got {p}")
    if d < 1:
        raise ValueError(f"need d >= 1, got {d}")
    pprime = p / (p - 1.0)
    if p <= 2.0:
        return (2.0 / p - 1.0) * (d + 0.5) + 1.0 / pprime
    return (2.0 / pprime - 1.0) * (d + 0.5) + 1.0 / p
