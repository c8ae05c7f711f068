"""Consolidated invariant suite behind `thetalab verify`.

Each check returns (module, invariant, measured, bound); a failure names all
three.  --quick shrinks grids so the full sweep stays interactive.
"""

import warnings

import numpy as np

from .skewform import SkewMatrix, canonical_form, rotation_block, spectral_gap
from .twistcal import BoundaryMassWarning, CocycleParams, GridField, GridGeometry


def _interior_bump(geom, center, width):
    def fn(pts):
        v = np.exp(-np.sum((pts - center) ** 2, axis=1) / (2.0 * width**2))
        v[np.max(np.abs(pts - center), axis=1) > geom.L / 2] = 0.0
        return v

    return GridField.from_function(geom, fn)


def _checks_skewform(quick):
    rng = np.random.default_rng(100)
    worst_recon = 0.0
    worst_alphas = 0.0
    for n in (3, 6):
        a = rng.standard_normal((n, n))
        th = SkewMatrix.from_array((a - a.T) / 2)
        cf = canonical_form(th)
        worst_recon = max(worst_recon, cf.reconstruction_residual(th))
        ev = np.linalg.eigvals(th.entries)
        pos = np.sort(ev.imag[ev.imag > 1e-10])[::-1]
        worst_alphas = max(worst_alphas, float(np.max(np.abs(cf.alphas - pos))))
    yield ("skewform", "reconstruction residual", worst_recon, 1e-10)
    yield ("skewform", "alphas vs generic eigensolver", worst_alphas, 1e-9)

    q, _ = np.linalg.qr(rng.standard_normal((6, 6)))
    a = rng.standard_normal((6, 6))
    th = SkewMatrix.from_array((a - a.T) / 2)
    conj = SkewMatrix.from_array(q.T @ th.entries @ q)
    diff = np.max(np.abs(canonical_form(th).alphas - canonical_form(conj).alphas))
    yield ("skewform", "orthogonal-conjugation invariance", float(diff), 1e-9)


def _checks_specfun(quick):
    from .specfun import (envelope_l1_norm, envelope_weight_scan,
                          gaussian_envelope, z_over_sin, z_over_tan)

    rng = np.random.default_rng(101)
    worst = 0.0
    for _ in range(20):
        z = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        worst = max(worst, abs(z_over_sin(z) - z_over_sin(-z)),
                    abs(z_over_tan(z) - z_over_tan(-z)))
    yield ("specfun", "evenness", worst, 1e-12)

    worst = 0.0
    for z in (1.0, 1 + 1j, 0.2 + 2j):
        ax = np.linspace(-40.0, 40.0, 20001)
        quad = float(np.trapezoid(gaussian_envelope(z, ax), ax)) ** 2
        worst = max(worst, abs(quad - envelope_l1_norm(z)))
    yield ("specfun", "envelope L1 closed form vs quadrature", worst, 1e-6)

    for z in (1.0, 2.0 + 1j):
        ys = np.linspace(0, 12, 10000)
        vals = gaussian_envelope(z, ys)
        yield ("specfun", f"envelope monotone on [0,inf) at z={z}",
               float(np.max(np.diff(vals))), 1e-15)

    yield ("specfun", "weighted envelope scan max", envelope_weight_scan()["max"], 4.0)


def _checks_kernel(quick):
    from .kernel import (KernelSpec, derivative_decay_slope, p_field, p_kernel,
                         p_l1_norm)

    thJ = SkewMatrix.from_array(rotation_block(1.0))
    spec = KernelSpec.for_theta(thJ)

    rng = np.random.default_rng(102)
    worst = 0.0
    for _ in range(10):
        t = rng.uniform(0.2, 2.0)
        s = rng.uniform(-2, 2, size=2)
        lam = 1.0
        direct = (lam / (4 * np.pi * np.sinh(lam * t))) * np.exp(
            -lam / np.tanh(t * lam) * (s @ s) / 4.0
        )
        worst = max(worst, abs(p_kernel(spec, t, s) - direct))
    yield ("kernel", "two-sided closed form agreement", worst, 1e-12)

    spec_eps = KernelSpec.for_theta(SkewMatrix.from_array(rotation_block(1e-3)))
    spec0 = KernelSpec.for_theta(SkewMatrix.zero(2))
    s = np.array([0.7, -0.4])
    rel = abs(p_kernel(spec_eps, 1.0, s) - p_kernel(spec0, 1.0, s)) / abs(
        p_kernel(spec0, 1.0, s)
    )
    yield ("kernel", "heat-kernel limit", float(rel), 1e-5)

    yield ("kernel", "unit mass of the flat-case kernel",
           abs(p_l1_norm(KernelSpec.for_theta(SkewMatrix.zero(2)), 1.0) - 1.0), 1e-8)
    yield ("kernel", "gap-weighted mass bounded",
           max(np.exp(t) * p_l1_norm(spec, t) for t in (0.1, 1.0, 5.0)), 2.0 + 1e-12)
    slope = derivative_decay_slope(num=5 if quick else 9)
    yield ("kernel", "derivative decay slope within [-3.2,-2.9]",
           slope, (-3.2, -2.9))

    geom = GridGeometry(2, 32 if quick else 48, 8.0)
    t = s_ = 0.4
    from .twistcal import twisted_convolve

    coc = CocycleParams(thJ)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", BoundaryMassWarning)
        conv = twisted_convolve(coc, p_field(spec, t, geom), p_field(spec, s_, geom))
    target = p_field(spec, t + s_, geom)
    rel = GridField(geom, conv.values - target.values).lp_norm(1) / target.lp_norm(1)
    yield ("kernel", "semigroup law on the grid", float(rel), 1e-3)


def _checks_twistcal(quick):
    from .twistcal import group_apply, plain_convolve_fft, sigma, twisted_convolve

    thJ = SkewMatrix.from_array(rotation_block(1.0))
    coc = CocycleParams(thJ)
    rng = np.random.default_rng(103)

    worst_id = 0.0
    worst_adj = 0.0
    for _ in range(100):
        s, t, r = rng.uniform(-3, 3, size=(3, 2))
        lhs = sigma(coc, s, t) * sigma(coc, s + t, r)
        rhs = sigma(coc, s, t + r) * sigma(coc, t, r)
        worst_id = max(worst_id, abs(lhs - rhs))
        worst_adj = max(worst_adj, abs(sigma(coc, s, t - s) - sigma(coc, -t, s)))
    yield ("twistcal", "cocycle identity", worst_id, 1e-12)
    yield ("twistcal", "cocycle adjoint identity", worst_adj, 1e-12)

    geom = GridGeometry(2, 32, 8.0)
    f = _interior_bump(geom, np.array([0.4, -0.3]), 0.8)
    h = geom.h
    worst = 0.0
    for _ in range(20 if quick else 100):
        t = h * rng.integers(-2, 3, size=2)
        s = h * rng.integers(-2, 3, size=2)
        lhs = group_apply(coc, t, group_apply(coc, s, f))
        rhs = group_apply(coc, t + s, f)
        phase = sigma(coc, t, s)
        worst = max(worst, float(np.max(np.abs(lhs.values - phase * rhs.values))))
    yield ("twistcal", "projective composition law", worst, 1e-12)

    g0 = CocycleParams(SkewMatrix.zero(2))
    a = _interior_bump(geom, np.array([0.2, 0.1]), 0.7)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", BoundaryMassWarning)
        d = twisted_convolve(g0, a, f)
    e = plain_convolve_fft(a, f)
    yield ("twistcal", "flat case matches FFT convolution",
           float(np.max(np.abs(d.values - e.values))), 1e-10)

    p = 3.0
    before = f.lp_norm(p)
    after = group_apply(coc, np.array([h * 3, -h * 2]), f).lp_norm(p)
    yield ("twistcal", "group action preserves lp norms",
           abs(before - after), 1e-12)

    worst = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", BoundaryMassWarning)
        for p in (1.0, 2.0, 4.0):
            conv = twisted_convolve(coc, a, f)
            worst = max(worst, conv.lp_norm(p) - a.lp_norm(1) * f.lp_norm(p))
    yield ("twistcal", "twisted Young inequality", worst, 1e-12)


def _checks_gridop(quick):
    from .gridop import (eigensystem, semigroup_crossval, sum_of_squares,
                         build_universal_tuple, universal_sum_of_squares)

    thJ = SkewMatrix.from_array(rotation_block(1.0))
    geom = GridGeometry(2, 24 if quick else 48, 8.0)
    op = universal_sum_of_squares(thJ, geom)
    yield ("gridop", "hermiticity of the assembled operator",
           op.hermiticity_defect(), 1e-10)
    w, _ = eigensystem(op)
    yield ("gridop", "positive semidefiniteness", float(-min(w[0], 0.0)), 1e-10)
    if not quick:
        yield ("gridop", "twisted Laplacian gap", float(abs(w[0] - 1.0)), 0.03)
        rel = semigroup_crossval(thJ, geom, 0.5)
        yield ("gridop", "semigroup crossvalidation", float(rel), 0.02)

    ops = build_universal_tuple(thJ, geom)
    lit = sum_of_squares(ops)
    yield ("gridop", "hermiticity of the literal sum of squares",
           lit.hermiticity_defect(), 1e-10)


def _checks_calculus(quick):
    from .calculus import mass_identity_error, representation_identity_error

    for z in (1.0, 1.0 + 1.0j):
        yield ("calculus", f"square-max mass identity at z={z}",
               mass_identity_error(z), 1e-6)
        yield ("calculus", f"iterated-average representation at z={z}",
               representation_identity_error(
                   z, [(0.0, 0.0), (0.7, -0.4), (-1.1, 0.5)]), 1e-4)


def _checks_horm(quick):
    from .horm import HormConfig, hormander_norm, required_order
    from .symbols import dilate, log_bump

    lb = log_bump(0.0, 0.7)
    cfg = HormConfig(s=1.5, max_refinements=1 if quick else 3)
    n1 = hormander_norm(lb, cfg).norm
    n2 = hormander_norm(dilate(lb, 2.0), cfg).norm
    yield ("horm", "dilation invariance", abs(n1 - n2), 1e-9)
    yield ("horm", "order formula at p=2", abs(required_order(2.0, 5) - 0.5), 0.0)
    yield ("horm", "order formula at p=4, d=1", abs(required_order(4.0, 1) - 1.0), 0.0)


def _checks_schur(quick):
    from .schur import multiplier_lower_bound, toeplitz_symbol, triangular_symbol
    from .symbols import imaginary_power

    sym = toeplitz_symbol(imaginary_power(1.0), "squared", 24, f0=1.0)
    lb = multiplier_lower_bound(sym, 2.0, trials=4, seed=9)
    mx = float(np.max(np.abs(sym.matrix())))
    yield ("schur", "p=2 lower bound hits max|psi|", abs(lb - mx), 1e-12)

    b1 = multiplier_lower_bound(triangular_symbol(32), 1.0, trials=8, seed=21)
    b2 = multiplier_lower_bound(triangular_symbol(32), 1.0, trials=8, seed=21)
    yield ("schur", "seeded determinism", abs(b1 - b2), 0.0)


def _checks_moyal(quick):
    from .moyal import doubled_matrix, relation_phase_errors

    thM = SkewMatrix.from_array(rotation_block(1.0))
    geom = GridGeometry(2, 24, 8.0)
    errs = relation_phase_errors(thM, geom, cases=20 if quick else 100)
    yield ("moyal", "commutation relation phases", max(errs.values()), 1e-12)

    theta12 = 1.0
    alpha = spectral_gap(doubled_matrix(thM))
    yield ("moyal", "doubled-matrix gap closed form",
           abs(alpha - np.sqrt(theta12**2 + 4.0)), 1e-9)


GROUPS = {
    "skewform": _checks_skewform,
    "specfun": _checks_specfun,
    "kernel": _checks_kernel,
    "twistcal": _checks_twistcal,
    "gridop": _checks_gridop,
    "calculus": _checks_calculus,
    "horm": _checks_horm,
    "schur": _checks_schur,
    "moyal": _checks_moyal,
}


def run_suite(what: str = "all", quick: bool = False) -> dict:
    """Run invariant checks; returns {passed, failures, checks}."""
    if what == "sqmax":
        groups = {"calculus": _checks_calculus}
    elif what == "squarefn":
        return _run_squarefn(quick)
    else:
        groups = GROUPS
    checks = []
    failures = []
    for name, gen in groups.items():
        for module, invariant, measured, bound in gen(quick):
            if isinstance(bound, tuple):
                ok = bound[0] <= measured <= bound[1]
            else:
                ok = measured <= bound
            checks.append({
                "module": module,
                "invariant": invariant,
                "measured": measured,
                "bound": list(bound) if isinstance(bound, tuple) else bound,
                "ok": bool(ok),
            })
            if not ok:
                failures.append(f"{module}: {invariant} = {measured!r}")
    return {"passed": not failures, "failures": failures, "checks": checks}


def _run_squarefn(quick: bool) -> dict:
    from .calculus import square_function_draws

    thJ = SkewMatrix.from_array(rotation_block(1.0))
    rep = square_function_draws(thJ, seed=20240, draws=10 if quick else 50)
    ok = rep["spread"] < 10.0 and rep["max"] < 4.0
    return {
        "passed": bool(ok),
        "failures": [] if ok else [f"squarefn: max={rep['max']} spread={rep['spread']}"],
        "checks": [{
            "module": "calculus",
            "invariant": "square-function ratio scan",
            "measured": {"max": rep["max"], "min": rep["min"],
                         "spread": rep["spread"], "seed": rep["seed"]},
            "bound": {"max": 4.0, "spread": 10.0},
            "ok": bool(ok),
        }],
    }
