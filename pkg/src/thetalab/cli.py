"""Experiment runner: one subcommand per module plus the consolidated
verify suite.  All outputs are deterministic CSV/JSON artifacts; every CSV
carries a version/seed comment line.

Exit codes: 0 success, 1 validation failure, 2 numerical failure.
"""

import argparse
import os
import sys

# honor the thread cap before any BLAS-backed import happens
_threads = os.environ.get("THETA_LAB_THREADS")
if _threads:
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(var, _threads)

import numpy as np  # noqa: E402


class ValidationFailure(Exception):
    pass


def _parse_complex(text: str) -> complex:
    try:
        re_, im_ = (float(p) for p in text.split(","))
    except ValueError as exc:
        raise ValidationFailure(f"expected 're,im', got {text!r}") from exc
    return complex(re_, im_)


def _parse_grid(text: str):
    from .twistcal import GridGeometry

    try:
        n_str, l_str = text.split(",")
        return int(n_str), float(l_str)
    except ValueError as exc:
        raise ValidationFailure(f"expected 'N,L', got {text!r}") from exc


def _parse_symbol(text: str):
    from . import symbols

    name, _, rest = text.partition(":")
    try:
        if name == "one":
            return symbols.constant(1.0)
        if name == "powi":
            return symbols.imaginary_power(float(rest) if rest else 1.0)
        if name == "br":
            nu, r = (float(p) for p in rest.split(","))
            return symbols.bochner_riesz_symbol(nu, r)
        if name == "logbump":
            c, w = (float(p) for p in rest.split(","))
            return symbols.log_bump(c, w)
    except (ValueError, TypeError) as exc:
        raise ValidationFailure(f"bad symbol spec {text!r}") from exc
    raise ValidationFailure(
        f"unknown symbol {name!r}; use one|powi[:a]|br:nu,R|logbump:c,w"
    )


def _emit(text: str):
    sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands


def cmd_canon(args):
    from . import __version__
    from .io import json_dump, load_matrix
    from .skewform import canonical_form

    theta = load_matrix(args.matrix)
    cf = canonical_form(theta)
    _emit(json_dump({
        "alphas": list(cf.alphas),
        "alpha": cf.alpha,
        "beta": cf.beta,
        "reconstruction_residual": cf.reconstruction_residual(theta),
        "version": __version__,
    }))
    return 0


def cmd_kernel(args):
    from . import __version__
    from .io import json_dump, load_matrix, write_csv
    from .kernel import KernelSpec, k_kernel, p_kernel, sector_l1_scan

    theta = load_matrix(args.theta)
    spec = KernelSpec.for_theta(theta)
    if args.scan_l1:
        scan = sector_l1_scan(spec, quadrature=args.quadrature)
        rows = [
            (z.real, z.imag, v / np.exp(spec.alpha * z.real),
             np.cos(np.angle(z)) * v)
            for z, v in zip(scan["zs"], scan["values"])
        ]
        write_csv(args.out or "scan_l1.csv",
                  ["re_z", "im_z", "l1", "weighted_l1"], rows, __version__)
        _emit(json_dump({"max_weighted": scan["max"],
                         "argmax_z": scan["argmax_z"], "version": __version__}))
        return 0
    z = _parse_complex(args.z)
    point = np.array([float(p) for p in args.point.split(",")])
    if len(point) != spec.n:
        raise ValidationFailure(
            f"point has {len(point)} entries, kernel dimension is {spec.n}"
        )
    val = p_kernel(spec, z, point)
    out = {"p": val, "version": __version__}
    if args.x is not None:
        x = np.array([float(p) for p in args.x.split(",")])
        out["k"] = k_kernel(spec, z, x, point)
    _emit(json_dump(out))
    return 0


def cmd_twist(args):
    from . import __version__
    from .io import json_dump, load_field, load_matrix, save_field
    from .twistcal import CocycleParams, twisted_convolve

    if args.action != "conv":
        raise ValidationFailure(f"unknown twist action {args.action!r}")
    theta = load_matrix(args.theta)
    f = load_field(args.f)
    g = load_field(args.g)
    out = twisted_convolve(CocycleParams(theta), f, g)
    save_field(args.out, out)
    _emit(json_dump({"out": args.out, "l1": out.lp_norm(1), "l2": out.lp_norm(2),
                     "version": __version__}))
    return 0


def cmd_spectrum(args):
    from . import __version__
    from .io import json_dump, load_matrix, write_csv
    from .gridop import spectrum, universal_sum_of_squares
    from .twistcal import GridGeometry

    theta = load_matrix(args.theta)
    n_pts, box = _parse_grid(args.grid)
    geom = GridGeometry(n=theta.dim, N=n_pts, L=box)
    op = universal_sum_of_squares(theta, geom)
    rep = spectrum(op, theta)
    count = args.count or min(32, len(rep.eigenvalues))
    if args.out:
        write_csv(args.out, ["index", "eigenvalue"],
                  list(enumerate(rep.eigenvalues[:count])), __version__)
    _emit(json_dump({
        "alpha": rep.alpha_ref,
        "lambda_min": rep.lambda_min,
        "gap_residual": rep.gap_residual,
        "eigenvalues": list(rep.eigenvalues[:count]),
        "version": __version__,
    }))
    return 0


def cmd_multiplier(args):
    from . import __version__
    from .calculus import (LaplaceMeasure, apply_bochner_riesz,
                           eig_semigroup, hille_phillips_apply)
    from .gridop import apply_spectral_function, universal_sum_of_squares
    from .io import json_dump, load_field, load_matrix, save_field
    from .skewform import spectral_gap
    from .twistcal import GridGeometry

    theta = load_matrix(args.theta)
    n_pts, box = _parse_grid(args.grid)
    geom = GridGeometry(n=theta.dim, N=n_pts, L=box)
    field = load_field(args.f)
    if field.geom != geom:
        raise ValidationFailure("field geometry does not match --grid")
    op = universal_sum_of_squares(theta, geom)

    name, _, rest = args.symbol.partition(":")
    if name == "exp":
        t = float(rest)
        out = hille_phillips_apply(LaplaceMeasure.dirac(t), eig_semigroup(op), field)
        ref = apply_spectral_function(op, lambda w: np.exp(-t * w), field)
    elif name == "resolvent":
        c = float(rest)
        out = hille_phillips_apply(LaplaceMeasure.exponential(rate=c),
                                   eig_semigroup(op), field)
        ref = apply_spectral_function(op, lambda w: 1.0 / (c + w), field)
    elif name == "br":
        nu, r = (float(p) for p in rest.split(","))
        out = apply_bochner_riesz(op, nu, r, field, shift=spectral_gap(theta))
        ref = field
    else:
        raise ValidationFailure(
            f"unknown multiplier symbol {args.symbol!r}; use exp:t|resolvent:c|br:nu,R"
        )
    save_field(args.out, out)
    resid = float(np.linalg.norm(out.values - ref.values)
                  / max(np.linalg.norm(ref.values), 1e-300))
    _emit(json_dump({"out": args.out, "residual_vs_reference": resid,
                     "version": __version__}))
    return 0


def cmd_horm(args):
    from . import __version__
    from .horm import HormConfig, hormander_norm, required_order
    from .io import json_dump

    if args.action == "order":
        _emit(json_dump({"order": required_order(args.p, args.d),
                         "version": __version__}))
        return 0
    sym = _parse_symbol(args.symbol)
    res = hormander_norm(sym, HormConfig(s=args.s))
    _emit(json_dump({
        "norm": res.norm if np.isfinite(res.norm) else "inf",
        "converged": res.converged,
        "diverged": res.diverged,
        "windows": res.windows,
        "version": __version__,
    }))
    return 0


def cmd_schur(args):
    from . import __version__
    from .io import json_dump, write_csv
    from .schur import growth_scan, toeplitz_symbol, triangular_symbol

    sizes = [int(s) for s in args.sizes.split(",")]
    if args.symbol == "tri":
        factory = triangular_symbol
    elif args.symbol.startswith("toeplitz:"):
        sym = _parse_symbol(args.symbol.split(":", 1)[1])
        f0 = args.f0 if args.f0 is not None else (
            1.0 if sym.descriptor.startswith("powi") else None)

        def factory(n):
            return toeplitz_symbol(sym, args.mode, n, f0=f0)
    else:
        raise ValidationFailure(
            f"unknown schur symbol {args.symbol!r}; use tri|toeplitz:<spec>"
        )
    scan = growth_scan(factory, args.p, sizes=sizes, trials=args.trials,
                       seed=args.seed)
    if args.out:
        write_csv(args.out, ["N", "lower_bound"],
                  list(zip(scan["sizes"], scan["bounds"])), __version__,
                  seed=args.seed)
    _emit(json_dump({k: scan[k] for k in
                     ("sizes", "bounds", "slope", "intercept", "r_squared",
                      "p", "seed", "trials")} | {"version": __version__}))
    return 0


def cmd_moyal(args):
    from . import __version__
    from .io import json_dump, load_matrix, write_csv
    from .moyal import harmonic_oscillator, relation_phase_errors
    from .twistcal import GridGeometry

    theta = load_matrix(args.theta)
    if args.action == "relations":
        geom = GridGeometry(n=theta.dim, N=args.n or 32, L=args.box or 8.0)
        errs = relation_phase_errors(theta, geom)
        _emit(json_dump(errs | {"version": __version__}))
        return 0
    if args.action == "spectrum":
        n_pts, box = _parse_grid(args.grid)
        geom = GridGeometry(n=theta.dim, N=n_pts, L=box)
        _, rep = harmonic_oscillator(theta, geom)
        count = min(32, len(rep.eigenvalues))
        if args.out:
            write_csv(args.out, ["index", "eigenvalue"],
                      list(enumerate(rep.eigenvalues[:count])), __version__)
        _emit(json_dump({
            "alpha": rep.alpha_ref,
            "lambda_min": rep.lambda_min,
            "eigenvalues": list(rep.eigenvalues[:count]),
            "version": __version__,
        }))
        return 0
    raise ValidationFailure(f"unknown moyal action {args.action!r}")


def cmd_verify(args):
    from . import __version__
    from .io import json_dump
    from .verify import run_suite

    report = run_suite(args.what, quick=args.quick)
    _emit(json_dump(report | {"version": __version__}))
    return 0 if report["passed"] else 2


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="thetalab",
                                description="twisted Weyl calculus laboratory")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("canon", help="canonical block form of a skew matrix")
    q.add_argument("--matrix", required=True)
    q.set_defaults(fn=cmd_canon)

    q = sub.add_parser("kernel", help="evaluate semigroup kernels")
    q.add_argument("action", nargs="?", default="eval", choices=["eval", "scan-l1"])
    q.add_argument("--theta", required=True)
    q.add_argument("--z", default="1,0")
    q.add_argument("--point", default="0,0")
    q.add_argument("--x", default=None, help="first argument of the two-point kernel")
    q.add_argument("--out", default=None)
    q.add_argument("--quadrature", action="store_true",
                   help="recompute scan norms by box quadrature")
    q.set_defaults(fn=lambda a: cmd_kernel(_normalize_kernel(a)))

    q = sub.add_parser("twist", help="twisted convolution of stored fields")
    q.add_argument("action", choices=["conv"])
    q.add_argument("--theta", required=True)
    q.add_argument("--f", required=True)
    q.add_argument("--g", required=True)
    q.add_argument("--out", required=True)
    q.set_defaults(fn=cmd_twist)

    q = sub.add_parser("spectrum", help="eigenvalues of the discretized operator")
    q.add_argument("--theta", required=True)
    q.add_argument("--grid", required=True, help="N,L")
    q.add_argument("--count", type=int, default=None)
    q.add_argument("--out", default=None)
    q.set_defaults(fn=cmd_spectrum)

    q = sub.add_parser("multiplier", help="apply a spectral multiplier to a field")
    q.add_argument("--theta", required=True)
    q.add_argument("--grid", required=True, help="N,L")
    q.add_argument("--symbol", required=True, help="exp:t | resolvent:c | br:nu,R")
    q.add_argument("--f", required=True)
    q.add_argument("--out", required=True)
    q.set_defaults(fn=cmd_multiplier)

    q = sub.add_parser("horm", help="windowed Sobolev multiplier norms")
    q.add_argument("action", nargs="?", default="norm", choices=["norm", "order"])
    q.add_argument("--symbol", default=None, help="one | powi[:a] | br:nu,R | logbump:c,w")
    q.add_argument("--s", type=float, default=None)
    q.add_argument("--p", type=float, default=None)
    q.add_argument("--d", type=int, default=None)
    q.set_defaults(fn=lambda a: cmd_horm(_normalize_horm(a)))

    q = sub.add_parser("schur", help="entrywise multiplier lower bounds")
    q.add_argument("--symbol", required=True, help="tri | toeplitz:<symbol>")
    q.add_argument("--p", type=float, required=True)
    q.add_argument("--sizes", default="8,16,32,64,128")
    q.add_argument("--trials", type=int, default=200)
    q.add_argument("--seed", type=int, default=42)
    q.add_argument("--mode", default="squared", choices=["squared", "signed"])
    q.add_argument("--f0", type=float, default=None)
    q.add_argument("--out", default=None)
    q.set_defaults(fn=cmd_schur)

    q = sub.add_parser("moyal", help="symbol-level oscillator experiments")
    q.add_argument("action", choices=["spectrum", "relations"])
    q.add_argument("--theta", required=True)
    q.add_argument("--grid", default=None, help="N,L (spectrum)")
    q.add_argument("--n", type=int, default=None, help="grid points (relations)")
    q.add_argument("--box", type=float, default=None, help="half-width (relations)")
    q.add_argument("--out", default=None)
    q.set_defaults(fn=lambda a: cmd_moyal(_normalize_moyal(a)))

    q = sub.add_parser("verify", help="run the invariant suite")
    q.add_argument("what", nargs="?", default="all",
                   choices=["all", "sqmax", "squarefn"])
    q.add_argument("--quick", action="store_true")
    q.set_defaults(fn=cmd_verify)
    return p


def _normalize_kernel(args):
    args.scan_l1 = args.action == "scan-l1"
    return args


def _normalize_horm(args):
    if args.action == "order":
        if args.p is None or args.d is None:
            raise ValidationFailure("horm order needs --p and --d")
    else:
        if args.symbol is None or args.s is None:
            raise ValidationFailure("horm norm needs --symbol and --s")
    return args


def _normalize_moyal(args):
    if args.action == "spectrum" and args.grid is None:
        raise ValidationFailure("moyal spectrum needs --grid N,L")
    return args


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports its own message
        return 1 if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except (ValidationFailure, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ArithmeticError, RuntimeError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
