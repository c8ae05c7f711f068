"""Scalar spectral-multiplier symbols on (0, inf)."""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class MultiplierSymbol:
    """A scalar function on (0, inf); eval must accept numpy arrays."""

    eval: callable
    descriptor: str

    def __call__(self, lam):
        return self.eval(np.asarray(lam, dtype=float))


def constant(value: float = 1.0) -> MultiplierSymbol:
    return MultiplierSymbol(lambda lam: np.full_like(lam, value, dtype=float),
                            f"const:{value:g}")


def imaginary_power(a: float = 1.0) -> MultiplierSymbol:
    """lambda^{ia} = e^{ia ln lambda}; modulus one, oscillating at 0 and inf."""
    return MultiplierSymbol(lambda lam: np.exp(1j * a * np.log(lam)), f"powi:{a:g}")


def bochner_riesz_symbol(nu: float, R: float) -> MultiplierSymbol:
    """(1 - lambda/R)_+^nu; equals 1 at 0+, vanishes for lambda >= R."""
    if nu <= 0 or R <= 0:
        raise ValueError(f"need nu > 0 and R > 0, got nu={nu} R={R}")

    def f(lam):
        return np.clip(1.0 - lam / R, 0.0, None) ** nu

    return MultiplierSymbol(f, f"br:{nu:g},{R:g}")


def log_bump(center: float = 0.0, width: float = 1.0) -> MultiplierSymbol:
    """Gaussian bump in log scale: exp(-((ln lambda - c)/w)^2).

    Dilation-covariant: dilating the argument shifts the bump in log scale,
    which makes it the natural probe for dilation-invariance checks.
    """
    def f(lam):
        return np.exp(-(((np.log(lam) - center) / width) ** 2))

    return MultiplierSymbol(f, f"logbump:{center:g},{width:g}")


def dilate(sym: MultiplierSymbol, R: float) -> MultiplierSymbol:
    """sym(./R)."""
    return MultiplierSymbol(lambda lam: sym.eval(lam / R),
                            f"dilate:{R:g}({sym.descriptor})")
