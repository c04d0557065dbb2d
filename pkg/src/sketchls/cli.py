"""Command line interface: ``sketchls {gen,solve,estimate,extrapolate,experiment}``."""
from __future__ import annotations

import argparse
import re
import sys

import numpy as np

from . import rng as _rng
from .bootstrap import DEFAULT_B, bootstrap_cs, bootstrap_ihs
from .data import SyntheticSpec, gen_synthetic, load_problem, write_problem
from .extrapolate import (SketchSizeModel, extrapolate_m, extrapolate_t, fit_geometric,
                          iterations_needed)
from .harness import run_cs_experiment, run_ihs_experiment
from .linalg import parse_norm, solve_exact_ls
from .sketch import SketchKind, make_sketch
from .solvers import classic_sketch, hessian_sketch, ihs_run

SKETCHES = [k.value for k in SketchKind]
_SIZE = re.compile(r"^\s*(\d+(?:\.\d+)?)\s*(d?)\s*$")


def parse_size(token: str, d: int) -> int:
    """``"600"`` -> 600, ``"5d"`` -> 5*d."""
    match = _SIZE.match(token)
    if not match:
        raise ValueError(f"bad size {token!r}; use an integer or a multiple of d like '5d'")
    value = float(match.group(1)) * (d if match.group(2) else 1)
    if value != int(value):
        raise ValueError(f"size {token!r} is not an integer for d={d}")
    return int(value)


def parse_grid(text: str, d: int) -> list:
    """Expand ``start:stop:step`` (inclusive; terms may use ``d``) or a comma list."""
    if "," in text or ":" not in text:
        return [parse_size(t, d) for t in text.split(",")]
    parts = text.split(":")
    if len(parts) not in (2, 3):
        raise ValueError(f"bad grid {text!r}; use start:stop[:step]")
    start, stop = parse_size(parts[0], d), parse_size(parts[1], d)
    step = parse_size(parts[2], d) if len(parts) == 3 else d
    if step < 1 or stop < start:
        raise ValueError(f"empty grid {text!r}")
    return list(range(start, stop + 1, step))


def _fmt_vec(x) -> str:
    return " ".join(format(float(v), ".17g") for v in x)


def _add_data(p):
    p.add_argument("--data", required=True, help="SKLS binary or LIBSVM text file")


def _add_sketch(p, default="gaussian"):
    p.add_argument("--sketch", choices=SKETCHES, default=default)
    p.add_argument("--seed", type=int, default=0)


def _add_boot(p):
    p.add_argument("--B", type=int, default=DEFAULT_B, help="bootstrap replicates")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--norm", default="l2", help="l1, l2, linf or lp:<p>")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sketchls",
                                     description="Sketched least squares with bootstrap error estimates.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a synthetic problem")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--cond", choices=["well", "ill"], default="well")
    p.add_argument("--tau", type=float, default=1e-3, help="noise standard deviation")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("solve", help="solve a problem exactly or by sketching")
    p.add_argument("method", choices=["exact", "cs", "hs", "ihs"])
    _add_data(p)
    p.add_argument("--m", default="20d", help="sketch size, e.g. 600 or 30d")
    p.add_argument("--t", type=int, default=5, help="IHS iterations")
    _add_sketch(p)

    p = sub.add_parser("estimate", help="sketched solve plus bootstrap error estimate")
    p.add_argument("method", choices=["cs", "ihs"])
    _add_data(p)
    p.add_argument("--m", default="20d")
    p.add_argument("--t", type=int, default=3, help="IHS iterations")
    _add_sketch(p)
    _add_boot(p)
    p.add_argument("--true-error", action="store_true",
                   help="also solve the full problem and print the actual error")

    p = sub.add_parser("extrapolate", help="apply an extrapolation rule")
    esub = p.add_subparsers(dest="rule", required=True)
    q = esub.add_parser("m", help="rescale an estimate from sketch size m0 to larger m")
    q.add_argument("--m0", type=int, required=True)
    q.add_argument("--eps", type=float, required=True)
    q.add_argument("--m", type=int, nargs="+", required=True)
    q = esub.add_parser("t", help="geometric fit through the estimates after iterations 1 and 2")
    q.add_argument("--eps1", type=float, required=True)
    q.add_argument("--eps2", type=float, required=True)
    q.add_argument("--i", type=int, nargs="*", default=[])
    q.add_argument("--target", type=float)

    p = sub.add_parser("experiment", help="Monte Carlo benchmark of the estimates, CSV output")
    p.add_argument("method", choices=["cs", "ihs"])
    _add_data(p)
    p.add_argument("--grid", default="5d:30d:5d", help="CS sketch sizes, start:stop:step")
    p.add_argument("--m0", default=None, help="CS initial sketch size (default: grid start)")
    p.add_argument("--m", default="50d", help="IHS sketch size")
    p.add_argument("--tmax", type=int, default=10, help="IHS iterations")
    p.add_argument("--trials", type=int, default=1000)
    _add_sketch(p, default="srht")
    _add_boot(p)
    p.add_argument("--out", default="-", help="CSV path, '-' for stdout")
    return parser


def _cmd_gen(args, out):
    problem = gen_synthetic(SyntheticSpec(args.n, args.d, args.cond, args.tau, args.seed))
    write_problem(problem, args.out)
    print(f"wrote {args.out} (n={problem.n}, d={problem.d})", file=out)


def _cmd_solve(args, out):
    problem = load_problem(args.data)
    if args.method == "exact":
        x = solve_exact_ls(problem)
    else:
        m = parse_size(args.m, problem.d)
        if args.method == "ihs":
            x = ihs_run(problem, args.sketch, m, args.t, seed=args.seed).x_last
        else:
            op = make_sketch(args.sketch, m, problem.n, args.seed)
            x = classic_sketch(problem, op).x_tilde if args.method == "cs" else hessian_sketch(problem, op)
    print(_fmt_vec(x), file=out)


def _cmd_estimate(args, out):
    problem = load_problem(args.data)
    m = parse_size(args.m, problem.d)
    norm = parse_norm(args.norm)
    boot_seed = _rng.derive_seed(args.seed, _rng.BOOTSTRAP)
    if args.method == "cs":
        cs = classic_sketch(problem, make_sketch(args.sketch, m, problem.n, args.seed))
        x = cs.x_tilde
        est = bootstrap_cs(cs.A_tilde, cs.b_tilde, cs.x_tilde, args.B, args.alpha, norm,
                           seed=boot_seed, workers=None)
    else:
        trace = ihs_run(problem, args.sketch, m, args.t, seed=args.seed)
        x = trace.x_last
        est = bootstrap_ihs(trace.A_tilde_t, trace.g_prev, trace.x_prev, trace.x_last,
                            args.B, args.alpha, norm, seed=boot_seed, workers=None)
    print(f"epsilon {est.epsilon:.17g}", file=out)
    print(f"replicates {est.B}", file=out)
    print(f"degenerate {est.degenerate_count}", file=out)
    if args.true_error:
        print(f"true_error {norm(x - solve_exact_ls(problem)):.17g}", file=out)


def _cmd_extrapolate(args, out):
    if args.rule == "m":
        model = SketchSizeModel(args.m0, args.eps)
        for m in args.m:
            print(f"{m} {extrapolate_m(model, m):.17g}", file=out)
        return
    model = fit_geometric(args.eps1, args.eps2)
    print(f"c_hat {model.c_hat:.17g}", file=out)
    print(f"eta_hat {model.eta_hat:.17g}", file=out)
    for i in args.i:
        print(f"{i} {extrapolate_t(model, i):.17g}", file=out)
    if args.target is not None:
        print(f"iterations_needed {iterations_needed(model, args.target)}", file=out)


def _cmd_experiment(args, out):
    problem = load_problem(args.data)
    norm = parse_norm(args.norm)
    if args.method == "cs":
        grid = parse_grid(args.grid, problem.d)
        m0 = parse_size(args.m0, problem.d) if args.m0 else None
        report = run_cs_experiment(problem, args.sketch, grid, m0, args.alpha, args.B,
                                   args.trials, norm, args.seed)
    else:
        report = run_ihs_experiment(problem, args.sketch, parse_size(args.m, problem.d),
                                    args.tmax, args.alpha, args.B, args.trials, norm, args.seed)
    if args.out == "-":
        out.write(report.to_csv())
    else:
        report.write_csv(args.out)


COMMANDS = {
    "gen": _cmd_gen,
    "solve": _cmd_solve,
    "estimate": _cmd_estimate,
    "extrapolate": _cmd_extrapolate,
    "experiment": _cmd_experiment,
}


def main(argv=None, out=None) -> int:
    """Run the CLI; returns the process exit status."""
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        COMMANDS[args.command](args, out)
    except (ValueError, OSError, np.linalg.LinAlgError, RuntimeError) as exc:
        msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        print(f"sketchls: error: {msg}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
