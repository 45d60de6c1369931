"""Command-line front end: ``solve``, ``eval``, ``bench`` and ``gen``.

Exit codes: 0 success, 1 usage error or incompatible request, 2 infeasible
schedule or exhausted budget, 3 unreadable or invalid input file.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from . import tardiness, testkit, wct
from .errors import (
    BudgetExceededError,
    FormatError,
    InfeasibleScheduleError,
    InvalidInstanceError,
    OwaSchedError,
)
from .model import (
    Instance,
    Objective,
    SolveReport,
    check_schedule,
    cost_vector,
    format_number,
    parse_instance,
    parse_schedule,
    scale_to_integers,
    serialize_instance,
)
from .owa import OwaWeights, owa_to_dict, owa_value, parse_owa, preset

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_INPUT = 0, 1, 2, 3

METHODS = (
    "minmax", "minmin", "hurwicz", "quantile", "owa-exact", "owa-quantile-approx",
    "wct-aggregate", "wct-lp2", "wct-hurwicz", "oracle",
)
TARDINESS_ONLY = ("minmax", "hurwicz", "quantile", "owa-exact", "owa-quantile-approx")
BENCH_COLUMNS = ("instance", "method", "objective", "oracle", "ratio", "millis")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")


def _read(path: str) -> str:
    try:
        return sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as e:
        raise FormatError(f"cannot read {path}: {e.strerror}") from e


def load_owa(source: str | None, k: int, *, q: int | None = None, alpha=None, default: str = "maximum") -> OwaWeights:
    """A preset name, inline JSON, or a path to an OWA JSON file."""
    if source is None:
        source = default
    if source.lstrip().startswith("{"):
        return parse_owa(source, k)
    if Path(source).is_file():
        return parse_owa(_read(source), k)
    try:
        return preset(source, k, q=q, alpha=alpha)
    except ValueError as e:
        raise UsageError(str(e)) from e


# ------------------------------------------------------------------ solving

def _requested_weights(method: str, inst: Instance, args) -> OwaWeights:
    if method == "minmax":
        return preset("maximum", inst.k)
    if method == "minmin":
        return preset("minimum", inst.k)
    if method in ("hurwicz", "wct-hurwicz"):
        return preset("hurwicz", inst.k, alpha=args.alpha)
    if method == "quantile":
        return preset("quantile", inst.k, q=args.k)
    return load_owa(args.owa, inst.k, q=args.k, alpha=args.alpha)


def run_method(method: str, inst: Instance, v: OwaWeights, *, alpha=None, k=None,
               budget=None, scale_integers: bool = False) -> SolveReport:
    """Dispatch one solver; ``v`` is the criterion the report is scored by."""
    tard = inst.objective is Objective.MAX_WEIGHTED_TARDINESS
    if method in ("hurwicz", "wct-hurwicz") and alpha is None:
        raise UsageError(f"{method} needs --alpha")
    if method == "quantile" and k is None:
        raise UsageError("quantile needs --k")
    if method in TARDINESS_ONLY and not tard or method.startswith("wct-") and tard:
        raise UsageError(f"method {method} does not apply to {inst.objective.value} instances")
    kw = {} if budget is None else {"budget": budget}
    if method == "minmax":
        rep = tardiness.solve_minmax(inst)
    elif method == "minmin":
        rep = tardiness.solve_min_min(inst) if tard else wct.solve_min_min_wct(inst)
    elif method == "hurwicz":
        rep = tardiness.solve_hurwicz(inst, alpha)
    elif method == "quantile":
        rep = tardiness.solve_quantile(inst, k, **kw)
    elif method == "owa-exact":
        scaled, factor = scale_to_integers(inst) if scale_integers else (inst, 1)
        rep = tardiness.solve_owa_bounded(scaled, v, **kw)
        if factor != 1:
            rep.extra["scale_factor"] = factor
    elif method == "owa-quantile-approx":
        rep = tardiness.approx_owa_quantile(inst, v, **kw)
    elif method == "wct-aggregate":
        rep = wct.approx_aggregate(inst, v)
    elif method == "wct-lp2":
        rep = wct.approx_lp_rounding(inst, v)
    elif method == "wct-hurwicz":
        rep = wct.solve_hurwicz_wct(inst, alpha)
    elif method == "oracle":
        rep = testkit.oracle_opt(inst, v)
    else:
        raise UsageError(f"unknown method {method!r}")
    # always score the schedule on the original instance under the requested weights
    rep.costs = cost_vector(inst, rep.schedule)
    rep.objective = owa_value(v, rep.costs)
    rep.method = method
    return rep


def _emit(doc: dict, args) -> None:
    text = json.dumps(doc) if args.porcelain else json.dumps(doc, indent=2)
    if args.output:
        Path(args.output).write_text(text + "\n")
    else:
        print(text)


def cmd_solve(args) -> int:
    inst = parse_instance(_read(args.instance))
    v = _requested_weights(args.method, inst, args)
    start = time.perf_counter()
    rep = run_method(args.method, inst, v, alpha=args.alpha, k=args.k, budget=args.budget,
                     scale_integers=args.scale_integers)
    doc = rep.to_dict()
    doc["owa"] = owa_to_dict(v)["v"]
    doc["wall_seconds"] = round(time.perf_counter() - start, 6)
    _emit(doc, args)
    return EXIT_OK


def cmd_eval(args) -> int:
    inst = parse_instance(_read(args.instance))
    sched = parse_schedule(_read(args.schedule))
    check_schedule(inst, sched)
    v = load_owa(args.owa, inst.k, q=args.k, alpha=args.alpha)
    costs = cost_vector(inst, sched)
    _emit({"cost_vector": [format_number(c) for c in costs],
           "owa_value": format_number(owa_value(v, costs))}, args)
    return EXIT_OK


# ---------------------------------------------------------------- benchmarks

def _bench_row(task) -> tuple:
    name, inst_text, method, v_doc, alpha, k, with_oracle, timing, cap = task
    inst = parse_instance(inst_text)
    v = parse_owa(v_doc, inst.k)
    start = time.perf_counter()
    rep = run_method(method, inst, v, alpha=alpha, k=k)
    millis = round((time.perf_counter() - start) * 1000, 3) if timing else 0
    if not with_oracle:
        return (name, method, format_number(rep.objective), "", "", millis)
    opt = testkit.oracle_opt(inst, v, cap=cap).objective
    if opt == 0:
        ratio = "1" if rep.objective == 0 else "inf"
    else:
        ratio = format_number(rep.objective / opt)
    return (name, method, format_number(rep.objective), format_number(opt), ratio, millis)


def _bench_suite(args) -> list[tuple[str, Instance]]:
    suite: list[tuple[str, Instance]] = []
    for path in args.instances or []:
        suite.append((Path(path).stem, parse_instance(_read(path))))
    for k in args.tight or []:
        suite.append((f"tight-k{k}", testkit.gen_tight_ratio(k)))
    for r in range(args.random):
        seed = args.seed + r
        suite.append((f"random-s{seed}", testkit.gen_random(
            seed, args.n, args.scenarios, objective=args.objective, max_value=args.max_value,
            precedence_density=args.density, positive=args.objective == "sum_wc")))
    return suite


def cmd_bench(args) -> int:
    suite = _bench_suite(args)
    with_oracle = not args.no_oracle
    if with_oracle:
        too_big = [name for name, inst in suite if inst.n > args.oracle_cap]
        if too_big:
            raise UsageError(f"oracle cap n <= {args.oracle_cap} exceeded by {', '.join(too_big)}; "
                             "raise --oracle-cap or pass --no-oracle")
    tasks = []
    for name, inst in suite:
        v = load_owa(args.owa, inst.k, q=args.k, alpha=args.alpha)
        for method in args.method:
            tasks.append((name, serialize_instance(inst), method, json.dumps(owa_to_dict(v)),
                          args.alpha, args.k, with_oracle, not args.no_timing, args.oracle_cap))
    if args.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            rows = list(pool.map(_bench_row, tasks))
    else:
        rows = [_bench_row(t) for t in tasks]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(BENCH_COLUMNS)
    writer.writerows(rows)
    if args.output:
        Path(args.output).write_text(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    return EXIT_OK


# ---------------------------------------------------------------- generators

def cmd_gen(args) -> int:
    owa_doc = None
    if args.family == "tight":
        inst = testkit.gen_tight_ratio(args.k)
    elif args.family == "random":
        inst = testkit.gen_random(
            args.seed, args.n, args.k, objective=args.objective, integral=not args.fractional,
            unit_time=args.unit_time, deterministic_p=args.deterministic_p,
            deterministic_w=args.deterministic_w, max_value=args.max_value,
            precedence_density=args.density, positive=args.positive)
    else:
        if not args.cnf:
            raise UsageError(f"{args.family} needs --cnf")
        phi = testkit.parse_dimacs(_read(args.cnf))
        if args.family == "cnf-duedates":
            inst = testkit.gen_cnf_duedates(phi)
        elif args.family == "cnf-weights":
            inst = testkit.gen_cnf_weights(phi)
        else:
            inst, v = testkit.gen_cnf_wct(phi, args.L)
            owa_doc = owa_to_dict(v)
    text = serialize_instance(inst)
    if args.output:
        Path(args.output).write_text(text + "\n")
    else:
        print(text)
    if owa_doc is not None:
        if args.owa_output:
            Path(args.owa_output).write_text(json.dumps(owa_doc) + "\n")
        else:
            print(json.dumps(owa_doc), file=sys.stderr)
    return EXIT_OK


# -------------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="owasched", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def output_flags(p):
        p.add_argument("--output", "-o", help="write to this file instead of stdout")
        p.add_argument("--porcelain", action="store_true", help="single-line JSON")

    def owa_flags(p):
        p.add_argument("--owa", help="preset name, inline JSON or JSON file (default: maximum)")
        p.add_argument("--alpha", type=_fraction, help="Hurwicz optimism weight in [0, 1]")
        p.add_argument("--k", type=int, help="quantile index (1-based)")

    p = sub.add_parser("solve", help="run one solver on an instance")
    p.add_argument("--instance", "-i", required=True)
    p.add_argument("--method", "-m", required=True, choices=METHODS)
    owa_flags(p)
    p.add_argument("--budget", type=int, help="enumeration budget for quantile / owa-exact")
    p.add_argument("--scale-integers", action="store_true",
                   help="scale parameters to integers before owa-exact")
    output_flags(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("eval", help="cost vector and OWA value of a given schedule")
    p.add_argument("--instance", "-i", required=True)
    p.add_argument("--schedule", "-s", required=True)
    owa_flags(p)
    output_flags(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench", help="CSV table of solver values against the oracle")
    p.add_argument("--method", "-m", action="append", choices=METHODS, default=[])
    p.add_argument("--instances", nargs="*", help="instance JSON files")
    p.add_argument("--tight", type=int, nargs="*", help="tight-ratio family sizes K")
    p.add_argument("--random", type=int, default=0, help="number of random instances")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--scenarios", type=int, default=3)
    p.add_argument("--objective", choices=[o.value for o in Objective], default="max_wt")
    p.add_argument("--max-value", type=int, default=20)
    p.add_argument("--density", type=float, default=0.0)
    owa_flags(p)
    p.add_argument("--no-oracle", action="store_true", help="skip the oracle and ratio columns")
    p.add_argument("--oracle-cap", type=int, default=testkit.DEFAULT_CAP,
                   help="largest n the oracle may enumerate")
    p.add_argument("--no-timing", action="store_true", help="write 0 in the millis column")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("gen", help="write a generated instance")
    p.add_argument("family", choices=("tight", "random", "cnf-duedates", "cnf-weights", "cnf-wct"))
    p.add_argument("--k", type=int, default=2, help="scenario count (tight, random)")
    p.add_argument("--n", type=int, default=6, help="job count (random)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--objective", choices=[o.value for o in Objective], default="max_wt")
    p.add_argument("--max-value", type=int, default=20)
    p.add_argument("--density", type=float, default=0.0)
    p.add_argument("--fractional", action="store_true", help="multiples of 1/4 instead of integers")
    p.add_argument("--unit-time", action="store_true")
    p.add_argument("--deterministic-p", action="store_true")
    p.add_argument("--deterministic-w", action="store_true")
    p.add_argument("--positive", action="store_true", help="draw values from 1..max")
    p.add_argument("--cnf", help="DIMACS file (cnf-* families)")
    p.add_argument("--L", type=int, default=0, help="zero-weight prefix length (cnf-wct)")
    p.add_argument("--owa-output", help="where cnf-wct writes its OWA weights")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InfeasibleScheduleError, BudgetExceededError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (FormatError, InvalidInstanceError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (UsageError, OwaSchedError, ValueError, IndexError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
