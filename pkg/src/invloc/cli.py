"""``invloc`` command line: forward, inverse, gen and verify.

Exit codes: 0 success, 2 bad input, 3 iteration limit, 4 infeasible,
5 verification failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

from .forward import DEFAULT_MAX_ITER, evaluate, solve_forward
from .ingest import (
    GeneratorConfig,
    InstanceFormatError,
    ingest_coordinates,
    parse_instance,
    parse_plan,
    write_instance,
    write_plan,
)
from .model import Instance, Norm, Objective, Outcome, Point, RunTrace
from .rowgen import DEFAULT_EPS, DEFAULT_MAX_OUTER, solve_inverse, verify_plan

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_LIMIT = 3
EXIT_INFEASIBLE = 4
EXIT_VERIFY = 5

_OUTCOME_EXIT = {
    Outcome.CONVERGED: EXIT_OK,
    Outcome.ITERATION_LIMIT: EXIT_LIMIT,
    Outcome.INFEASIBLE: EXIT_INFEASIBLE,
}


class InputError(Exception):
    pass


def _g(v) -> str:
    """Human output: 7 significant digits."""
    return f"{float(v):.7g}"


def _m(v) -> str:
    """Machine output: 15 significant digits."""
    return f"{float(v):.15g}"


def _pt(p) -> str:
    return f"({_g(p[0])}, {_g(p[1])})"


def _read_text(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None


def _write_text(path, text: str):
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc.strerror or exc}") from None


def _load_instance(path, args) -> Instance:
    try:
        inst = parse_instance(_read_text(path))
    except InstanceFormatError as exc:
        raise InputError(f"{path}: {exc}") from None
    if getattr(args, "objective", None):
        inst = replace(inst, objective=Objective(args.objective))
    if getattr(args, "p", None) is not None:
        try:
            inst = replace(inst, norm=Norm(args.p))
        except ValueError as exc:
            raise InputError(str(exc)) from None
    return inst


def trace_csv(trace: RunTrace) -> str:
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(["k", "x", "y", "cost", "delta_w"])
    for r in trace.records:
        out.writerow([r.k, _m(r.x_k.x), _m(r.x_k.y), _m(r.cost_k), _m(r.delta_w)])
    return buf.getvalue()


# --- subcommands -------------------------------------------------------------------


def cmd_forward(args, out) -> int:
    inst = _load_instance(args.instance, args)
    res = solve_forward(inst, max_iter=args.max_iter or DEFAULT_MAX_ITER)
    print(f"objective: {inst.objective.value}  p: {_g(inst.norm.p)}  n: {inst.n}", file=out)
    print(f"x*: {_pt(res.x_star)}", file=out)
    print(f"f(x*): {_g(res.objective_value)}", file=out)
    print(f"iterations: {res.iterations}  converged: {'yes' if res.converged else 'no'}",
          file=out)
    if args.out:
        _write_text(args.out, f"x {_m(res.x_star.x)}\ny {_m(res.x_star.y)}\n"
                              f"f {_m(res.objective_value)}\n")
    return EXIT_OK if res.converged else EXIT_LIMIT


def _report_inverse(trace: RunTrace, out, label=""):
    last = trace.final_record
    head = f"[{label}] " if label else ""
    print(f"{head}outcome: {trace.outcome.value} ({trace.stop_reason})", file=out)
    print(f"{head}t: {trace.iterations}", file=out)
    if last is not None:
        print(f"{head}x^(t): {_pt(last.x_k)}", file=out)
        print(f"{head}delta_w: {_g(last.delta_w)}", file=out)
    if trace.final_plan is not None:
        print(f"{head}C*: {_g(trace.final_plan.cost)}", file=out)
        print(f"{head}w_hat: " + " ".join(_g(v) for v in trace.final_plan.w_hat), file=out)


def cmd_inverse(args, out) -> int:
    if args.batch:
        return _inverse_batch(args, out)
    if args.instance is None:
        raise InputError("inverse needs an instance file or --batch DIR")
    inst = _load_instance(args.instance, args)
    x_bar = Point(*args.xbar)
    trace = solve_inverse(inst, x_bar, eps=args.eps,
                          max_outer=args.max_iter or DEFAULT_MAX_OUTER)
    _report_inverse(trace, out)
    if args.trace:
        _write_text(args.trace, trace_csv(trace))
    if args.out and trace.final_plan is not None:
        _write_text(args.out, write_plan(trace.final_plan))
    return _OUTCOME_EXIT[trace.outcome]


def _batch_job(path, objective, p, x_bar, eps, max_outer, out_dir):
    ns = argparse.Namespace(objective=objective, p=p)
    try:
        inst = _load_instance(path, ns)
    except InputError as exc:
        return path, EXIT_INPUT, str(exc)
    trace = solve_inverse(inst, x_bar, eps=eps, max_outer=max_outer)
    stem = Path(path).stem
    Path(out_dir, stem + ".trace.csv").write_text(trace_csv(trace), encoding="utf-8")
    if trace.final_plan is not None:
        Path(out_dir, stem + ".plan").write_text(write_plan(trace.final_plan), encoding="utf-8")
    buf = io.StringIO()
    _report_inverse(trace, buf, label=stem)
    return path, _OUTCOME_EXIT[trace.outcome], buf.getvalue()


def _inverse_batch(args, out) -> int:
    src = Path(args.batch)
    if not src.is_dir():
        raise InputError(f"--batch expects a directory, got {src}")
    files = sorted(src.glob("*.inst"))
    if not files:
        raise InputError(f"no *.inst files in {src}")
    out_dir = Path(args.out) if args.out else src
    out_dir.mkdir(parents=True, exist_ok=True)
    jobs = [(str(f), args.objective, args.p, Point(*args.xbar), args.eps,
             args.max_iter or DEFAULT_MAX_OUTER, str(out_dir)) for f in files]
    with ProcessPoolExecutor() as pool:
        results = list(pool.map(_batch_job, *zip(*jobs)))
    worst = EXIT_OK
    for path, code, text in results:
        if code == EXIT_INPUT:
            print(text, file=sys.stderr)
        else:
            out.write(text)
        worst = max(worst, code)
    return worst


def cmd_gen(args, out) -> int:
    text = _read_text(args.coords)
    try:
        cfg = GeneratorConfig(seed=args.seed)
        norm = Norm(args.p if args.p is not None else 2.0)
        inst = ingest_coordinates(text, cfg, norm, args.objective or Objective.MINISUM)
    except ValueError as exc:  # InstanceFormatError included
        raise InputError(f"{args.coords}: {exc}") from None
    rendered = f"# generated from {Path(args.coords).name} with seed {args.seed}\n"
    rendered += write_instance(inst)
    if args.out:
        _write_text(args.out, rendered)
    else:
        out.write(rendered)
    return EXIT_OK


def cmd_verify(args, out) -> int:
    inst = _load_instance(args.instance, args)
    try:
        plan = parse_plan(_read_text(args.plan))
    except InstanceFormatError as exc:
        raise InputError(f"{args.plan}: {exc}") from None
    if plan.n != inst.n:
        raise InputError(f"plan has {plan.n} weights but the instance has {inst.n} sites")
    x_bar = Point(*args.xbar)
    f_bar = evaluate(inst, x_bar, plan.w_hat)
    tol = 10.0 * args.eps * max(1.0, f_bar)
    rep = verify_plan(inst, x_bar, plan, tol)
    print(f"x_fwd: {_pt(rep.x_forward)}", file=out)
    print(f"f(x_bar): {_g(rep.f_x_bar)}  f(x_fwd): {_g(rep.f_forward)}", file=out)
    print(f"gap: {_g(rep.gap)}  tol: {_g(tol)}  |x_bar - x_fwd|: {_g(rep.distance)}", file=out)
    print("pass" if rep.passed else "fail", file=out)
    return EXIT_OK if rep.passed else EXIT_VERIFY


# --- argument parsing --------------------------------------------------------------


def _positive(text):
    v = float(text)
    if not (v > 0.0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def _seed(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("seed must be nonnegative")
    return v


def build_parser() -> argparse.ArgumentParser:
    # argparse exits with 2 on usage errors, which matches our input-error code
    parser = argparse.ArgumentParser(prog="invloc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, with_xbar=False):
        sp.add_argument("--objective", choices=[o.value for o in Objective],
                        help="override the objective in the file header")
        sp.add_argument("--p", type=float, help="override the L_p exponent")
        if with_xbar:
            sp.add_argument("--xbar", type=float, nargs=2, metavar=("X", "Y"), required=True)
            sp.add_argument("--eps", type=_positive, default=DEFAULT_EPS)

    sp = sub.add_parser("forward", help="solve the location problem for the given weights")
    sp.add_argument("instance")
    common(sp)
    sp.add_argument("--max-iter", type=int, help="iteration cap per continuation stage")
    sp.add_argument("--out", help="write x, y and f with 15 significant digits")

    sp = sub.add_parser("inverse", help="cheapest weight change making x_bar optimal")
    sp.add_argument("instance", nargs="?")
    common(sp, with_xbar=True)
    sp.add_argument("--max-iter", type=int, help=f"outer rounds (default {DEFAULT_MAX_OUTER})")
    sp.add_argument("--trace", help="CSV with one row per iteration")
    sp.add_argument("--out", help="plan file (with --batch: output directory)")
    sp.add_argument("--batch", help="run every *.inst file in this directory")

    sp = sub.add_parser("gen", help="instance from a coordinate list with random parameters")
    sp.add_argument("coords")
    common(sp)
    sp.add_argument("--seed", type=_seed, default=0)
    sp.add_argument("--out")

    sp = sub.add_parser("verify", help="check that a plan makes x_bar optimal")
    sp.add_argument("instance")
    sp.add_argument("plan")
    common(sp, with_xbar=True)
    return parser


_COMMANDS = {"forward": cmd_forward, "inverse": cmd_inverse, "gen": cmd_gen,
             "verify": cmd_verify}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args, sys.stdout)
    except InputError as exc:
        print(f"invloc: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
