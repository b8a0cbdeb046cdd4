"""Command-line interface.

Exit codes: 0 success (SAT for ``check``, core/IIS found otherwise),
1 UNSAT for ``check`` / feasible model or unverified IIS elsewhere,
2 usage or parse error, 3 timeout.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .bench import BENCH_METHODS, BenchLimits, run_benchmark, summarize, write_csv, write_summary_csv
from .minimize import METHODS, FeasibleInputError, minimize
from .model import ModelError
from .modelio import read_model, save_model, write_model
from .schedule import INJECTIONS, ScheduleError, ScheduleParams, generate_instance, load_manifest
from .search import SAT, TIMEOUT, SearchOptions, extract_conflict_set, implication_dot

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE, EXIT_TIMEOUT = 0, 1, 2, 3


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _json(data) -> str:
    return json.dumps(data, indent=2) + "\n"


def _trace_sink(args):
    if not args.trace:
        return None, None
    if args.trace == "-":
        return (lambda line: print(line, file=sys.stderr)), None
    fh = open(args.trace, "w", encoding="utf-8")
    return (lambda line: fh.write(line + "\n")), fh


def _search(args):
    sink, fh = _trace_sink(args)
    try:
        return extract_conflict_set(
            read_model(args.model),
            SearchOptions(learning=not args.no_learning, time_limit_ms=args.time_limit_ms),
            trace=sink,
        )
    finally:
        if fh:
            fh.close()


def cmd_check(args) -> int:
    outcome = _search(args)
    if outcome.status == TIMEOUT:
        _emit("TIMEOUT\n", args.out)
        return EXIT_TIMEOUT
    _emit("SAT\n" if outcome.status == SAT else "UNSAT\n", args.out)
    return EXIT_OK if outcome.status == SAT else EXIT_NEGATIVE


def cmd_core(args) -> int:
    outcome = _search(args)
    _emit(_json(outcome.core_dict(timing=not args.no_timing)), args.out)
    if outcome.status == TIMEOUT:
        return EXIT_TIMEOUT
    return EXIT_NEGATIVE if outcome.status == SAT else EXIT_OK


def cmd_iis(args) -> int:
    model = read_model(args.model)
    try:
        result = minimize(
            model,
            args.method,
            memo=not args.no_memo,
            learning=not args.no_learning,
            time_limit_ms=args.time_limit_ms,
            verify=True,
        )
    except FeasibleInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NEGATIVE
    _emit(_json(result.to_dict(timing=not args.no_timing)), args.out)
    if not result.complete:
        return EXIT_TIMEOUT
    return EXIT_OK if result.verified else EXIT_NEGATIVE


def cmd_gen(args) -> int:
    if args.params:
        text = args.params
        if not text.lstrip().startswith("{"):
            text = Path(text).read_text(encoding="utf-8")
        params = ScheduleParams.from_dict(json.loads(text))
    else:
        params = ScheduleParams(
            agents=args.agents,
            days=args.days,
            shifts=args.shifts,
            demand=args.demand,
            max_shifts_per_day=args.max_shifts,
            window_cap=args.window_cap,
            dayoffs=[tuple(int(v) for v in pair.split(",")) for pair in args.dayoff],
            random_dayoffs=args.random_dayoffs,
            injection=args.injection,
            seed=args.seed,
        )
    model = generate_instance(params)
    if args.out:
        write_model(model, args.out)
    else:
        sys.stdout.write(save_model(model))
    return EXIT_OK


def cmd_bench(args) -> int:
    params = load_manifest(args.manifest)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    instances = [(p.label, generate_instance(p)) for p in params]
    rows = run_benchmark(
        instances,
        methods,
        BenchLimits(
            time_limit_ms=args.time_limit_ms,
            memo=not args.no_memo,
            learning=not args.no_learning,
        ),
        workers=args.workers,
    )
    timing = not args.no_timing
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            write_csv(rows, fh, timing)
        write_summary_csv(summarize(rows), sys.stdout, timing)
    else:
        write_csv(rows, sys.stdout, timing)
        write_summary_csv(summarize(rows), sys.stderr, timing)
    if args.summary_out:
        with open(args.summary_out, "w", encoding="utf-8", newline="") as fh:
            write_summary_csv(summarize(rows), fh, timing)
    return EXIT_OK


def cmd_export_dot(args) -> int:
    outcome = _search(args)
    _emit(implication_dot(outcome), args.out)
    if outcome.status == TIMEOUT:
        return EXIT_TIMEOUT
    return EXIT_OK if outcome.final_conflict is not None else EXIT_NEGATIVE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pbiis", description="Diagnose infeasible pseudo-Boolean models."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, model=True, search=True):
        if model:
            p.add_argument("model", help="model file (JSON or OPB)")
        p.add_argument("--out", help="write output here instead of stdout")
        p.add_argument("--time-limit-ms", type=float, default=None)
        if search:
            p.add_argument("--no-learning", action="store_true", help="disable no-good learning")
            p.add_argument(
                "--trace",
                nargs="?",
                const="-",
                default=None,
                help="write the search trace to FILE (stderr if no FILE)",
            )

    p = sub.add_parser("check", help="print SAT or UNSAT")
    common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("core", help="print the conflict core as JSON")
    common(p)
    p.add_argument("--no-timing", action="store_true")
    p.set_defaults(func=cmd_core)

    p = sub.add_parser("iis", help="minimize to an irreducible infeasible subset")
    common(p, search=False)
    p.add_argument("--method", choices=METHODS, default="csea+qx")
    p.add_argument("--no-learning", action="store_true")
    p.add_argument("--no-memo", action="store_true", help="disable the oracle memo cache")
    p.add_argument("--no-timing", action="store_true")
    p.set_defaults(func=cmd_iis)

    p = sub.add_parser("gen", help="generate a scheduling instance as model JSON")
    p.add_argument("--params", help="ScheduleParams as inline JSON or a JSON file")
    p.add_argument("--agents", type=int, default=4)
    p.add_argument("--days", type=int, default=7)
    p.add_argument("--shifts", type=int, default=2)
    p.add_argument("--demand", type=int, default=1)
    p.add_argument("--max-shifts", type=int, default=1)
    p.add_argument("--window-cap", type=int, default=None)
    p.add_argument("--dayoff", action="append", default=[], metavar="AGENT,DAY",
                   help="0-based day-off request; repeatable")
    p.add_argument("--random-dayoffs", type=int, default=0)
    p.add_argument("--injection", choices=INJECTIONS, default="none")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="run methods over a manifest and write CSV")
    p.add_argument("manifest", help="JSON list of ScheduleParams")
    p.add_argument("--methods", default=",".join(BENCH_METHODS))
    common(p, model=False, search=False)
    p.add_argument("--no-learning", action="store_true")
    p.add_argument("--no-memo", action="store_true")
    p.add_argument("--no-timing", action="store_true")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--summary-out", help="also write the per-method summary CSV here")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("export-dot", help="Graphviz implication graph of the final conflict")
    common(p)
    p.set_defaults(func=cmd_export_dot)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ModelError, ScheduleError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
