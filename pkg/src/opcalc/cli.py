"""Command line front end.

Exit codes: 0 success, 2 input error, 3 numerical failure (including failed
verification), 4 dense size guard exceeded.  JSON goes to stdout or
``--out``; diagnostics go to stderr.
"""

import argparse
import logging
import sys

import numpy as np

from . import calculus, discretize, schrodinger
from .algebra import apply, represent
from .errors import (
    BoundDiverges,
    EigenSolverFailure,
    FunctionUndefinedOnSpectrum,
    GeometryError,
    NotInvertible,
    SizeGuardExceeded,
)
from .oracle import verify
from .subsets import axes
from .serialize import (
    SpecError,
    cpair,
    dumps,
    element_from_json,
    element_to_json,
    grid_function_from_json,
    grid_function_to_json,
    load_path,
    write_atomic,
)
from .testing import random_instance

log = logging.getLogger("opcalc")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3
EXIT_SIZE = 4


def _clist(values):
    return [cpair(z) for z in values]


def spectrum_to_json(report, labels=None):
    key = lambda a: ",".join(map(str, axes(a))) or "empty"  # noqa: E731
    doc = {
        "per_alpha": {key(a): _clist(v) for a, v in report.per_alpha.items()},
        "union": _clist(report.union),
        "layers": {key(a): _clist(v) for a, v in report.layers.items()},
        "dedup_tol": report.tol,
    }
    if labels:
        doc["labeled_layers"] = {name: _clist(v) for name, v in report.labeled_layers().items()}
    return doc


def parse_function(text):
    """``inverse | exp | sqrt | poly:c0,c1,... | resolvent:re,im``."""
    name, _, arg = text.partition(":")
    try:
        if name == "inverse" and not arg:
            return calculus.inverse()
        if name == "exp" and not arg:
            return calculus.exp()
        if name == "sqrt" and not arg:
            return calculus.sqrt()
        if name == "poly":
            return calculus.polynomial([complex(c.replace("i", "j")) for c in arg.split(",")])
        if name == "resolvent":
            re, im = (float(t) for t in arg.split(","))
            return calculus.resolvent(complex(re, im))
    except ValueError as exc:
        raise SpecError(f"--fn {text!r}: {exc}") from None
    raise SpecError(f"--fn {text!r}: expected inverse, exp, sqrt, poly:c0,c1,... or resolvent:re,im")


def _param(text):
    key, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    try:
        return key, int(value)
    except ValueError:
        pass
    try:
        return key, float(value)
    except ValueError:
        return key, [int(t) for t in value.split(",")]


def cmd_spectrum(args):
    X = element_from_json(load_path(args.spec), str(args.spec))
    return spectrum_to_json(calculus.spectrum(X, args.dedup_tol))


def cmd_apply_fn(args):
    X = element_from_json(load_path(args.spec), str(args.spec))
    return element_to_json(calculus.apply_function(X, parse_function(args.fn)))


def cmd_solve(args):
    X = element_from_json(load_path(args.spec), str(args.spec))
    rhs = grid_function_from_json(load_path(args.rhs), X.geometry, args.q, str(args.rhs))
    u = calculus.solve(X, rhs)
    resid = np.linalg.norm(apply(X, u).values - rhs.values)
    doc = grid_function_to_json(u)
    doc["residual"] = float(resid)
    return doc


def cmd_discretize(args):
    params = dict(args.param or [])
    try:
        spec = discretize.builtin_kernel(args.kernel, N=args.N, **params)
    except TypeError as exc:
        raise SpecError(f"kernel {args.kernel!r}: {exc}") from None
    X = discretize.sample_kernel(spec, args.p)
    doc = {"spec": element_to_json(X), "bound": discretize.approximation_bound(spec, args.p)}
    if args.measure:
        doc["measured_gap"] = discretize.measured_gap(spec, args.p, args.q_fine)
    return doc


def cmd_schrodinger(args):
    try:
        cfg = schrodinger.SchrodingerConfig(
            args.lam, args.eps, (args.v1, args.v2, args.v3), args.p, allow_large=args.allow_large
        )
    except ValueError as exc:
        raise SpecError(str(exc)) from None
    sol = schrodinger.solve_wavefunction(cfg)
    report = schrodinger.classify_spectrum(cfg)
    g = args.eval_grid
    t = (np.arange(g) + 0.5) / g
    k = np.stack(np.meshgrid(t, t, t, indexing="ij"), axis=-1).reshape(-1, 3)
    psi = sol(k)
    doc = {
        "config": {"lambda": cfg.lam, "eps": cfg.epsilon, "V": list(cfg.V), "p": cfg.p},
        "spectrum": spectrum_to_json(report, labels=True),
        "psi": {
            "k1": k[:, 0].tolist(),
            "k2": k[:, 1].tolist(),
            "k3": k[:, 2].tolist(),
            "re": psi.real.tolist(),
            "im": psi.imag.tolist(),
        },
        "psi_l2_norm": sol.l2_norm(),
        "error_report": schrodinger.error_report(cfg),
    }
    if args.verify:
        X = schrodinger.build_operator(cfg)
        u = sol.on_grid(2)
        resid = np.linalg.norm(apply(X, u).values - 1) / np.sqrt(u.values.size)
        herm = 0.0
        for B in represent(X).blocks:
            H = B + 1j * cfg.epsilon * np.eye(B.shape[0])
            herm = max(herm, float(np.abs(H - H.conj().T).max()))
        doc["verify"] = {"relative_residual": float(resid), "hermitian_defect": herm}
    return doc


def cmd_verify(args):
    X = element_from_json(load_path(args.spec), str(args.spec))
    report = verify(X, q=args.q, seed=args.seed)
    if not report["passed"]:
        failed = [k for k, v in report["checks"].items() if not v["passed"]]
        log.error("oracle checks failed: %s", ", ".join(failed))
    return report


def cmd_generate_random(args):
    return element_to_json(random_instance(args.seed, args.N, args.S, args.M))


def build_parser():
    parser = argparse.ArgumentParser(prog="opcalc", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_out(p):
        p.add_argument("--out", help="write JSON here (atomically) instead of stdout")
        return p

    p = with_out(sub.add_parser("spectrum", help="block spectra, union and layers"))
    p.add_argument("spec")
    p.add_argument("--dedup-tol", type=float, default=None)
    p.set_defaults(func=cmd_spectrum)

    p = with_out(sub.add_parser("apply-fn", help="f(A) as a new spec"))
    p.add_argument("spec")
    p.add_argument("--fn", required=True)
    p.set_defaults(func=cmd_apply_fn)

    p = with_out(sub.add_parser("solve", help="solve A u = rhs on a refined grid"))
    p.add_argument("spec")
    p.add_argument("--rhs", required=True)
    p.add_argument("--q", type=int, default=None)
    p.set_defaults(func=cmd_solve)

    p = with_out(sub.add_parser("discretize", help="midpoint-sample a named kernel family"))
    p.add_argument("--kernel", required=True)
    p.add_argument("--param", action="append", type=_param, metavar="KEY=VALUE")
    p.add_argument("--N", type=int, default=1)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--measure", action="store_true", help="also measure the gap on a fine grid")
    p.add_argument("--q-fine", type=int, default=16)
    p.set_defaults(func=cmd_discretize)

    p = with_out(sub.add_parser("schrodinger", help="3D lattice defect problem"))
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--v1", type=float, default=0.0)
    p.add_argument("--v2", type=float, default=0.0)
    p.add_argument("--v3", type=float, default=0.0)
    p.add_argument("--p", type=int, default=4)
    p.add_argument("--eval-grid", type=int, default=4)
    p.add_argument("--allow-large", action="store_true")
    p.add_argument("--verify", action="store_true")
    p.set_defaults(func=cmd_schrodinger)

    p = with_out(sub.add_parser("verify", help="cross-check against dense oracles"))
    p.add_argument("spec")
    p.add_argument("--q", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = with_out(sub.add_parser("generate-random", help="reproducible random spec"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--S", type=int, default=None)
    p.add_argument("--M", type=int, default=None)
    p.set_defaults(func=cmd_generate_random)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="opcalc: %(message)s")
    try:
        doc = args.func(args)
        text = dumps(doc)
    except (SpecError, GeometryError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_INPUT
    except SizeGuardExceeded as exc:
        log.error("%s", exc)
        return EXIT_SIZE
    except (NotInvertible, FunctionUndefinedOnSpectrum, EigenSolverFailure, BoundDiverges) as exc:
        log.error("%s", exc)
        return EXIT_NUMERIC
    except ValueError as exc:
        log.error("%s", exc)
        return EXIT_INPUT
    if args.out:
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)
    if args.command == "verify" and not doc["passed"]:
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
