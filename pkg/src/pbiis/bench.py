"""Benchmark runner: every (instance, method) cell becomes one CSV row.

Methods: ``csea`` (conflict core only), ``csea+qx``, ``qx``, ``deletion`` and
``additive``.  For ``csea`` and ``csea+qx`` the ``red_cons`` column is the
conflict core size; for the other methods it is the size of the returned IIS.
"""

from __future__ import annotations

import csv
import io
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence, TextIO

from .minimize import FeasibleInputError, csea_then_quickxplain, minimize
from .model import Model
from .search import SAT, SearchOptions, extract_conflict_set
from .stats import CSV_COLUMNS, RunStats

BENCH_METHODS = ("csea", "csea+qx", "qx", "deletion", "additive")
SUMMARY_COLUMNS = (
    "method",
    "runs",
    "solved",
    "median_time_ms",
    "median_oracle_calls",
    "mean_reduction_pct",
    "verified",
)


@dataclass
class BenchLimits:
    time_limit_ms: float | None = None
    memo: bool = True
    learning: bool = True
    verify: bool = True


def _base(instance: str, method: str, model: Model) -> RunStats:
    return RunStats(
        instance=instance,
        method=method,
        cons=len(model.raw),
        vars=model.num_vars,
        avg_lit=model.avg_literals(),
    )


def _with_search(row: RunStats, search: RunStats) -> RunStats:
    for name in ("red_cons", "conflicts", "decisions", "backtracks", "learned", "max_dl"):
        setattr(row, name, getattr(search, name))
    return row


def run_cell(instance: str, model: Model, method: str, limits: BenchLimits) -> RunStats:
    row = _base(instance, method, model)
    if method == "csea":
        outcome = extract_conflict_set(
            model, SearchOptions(learning=limits.learning, time_limit_ms=limits.time_limit_ms)
        )
        _with_search(row, outcome.stats)
        row.time_ms = outcome.stats.time_ms
        row.outcome = outcome.status
        return row
    try:
        if method == "csea+qx":
            result = csea_then_quickxplain(
                model, limits.memo, limits.learning, limits.time_limit_ms, limits.verify
            )
            _with_search(row, result.search.stats)
        else:
            result = minimize(
                model, method, limits.memo, limits.learning, limits.time_limit_ms, limits.verify
            )
            row.red_cons = len(result.names)
    except FeasibleInputError as exc:
        search = getattr(exc, "search", None)
        if search is not None:
            _with_search(row, search.stats)
        row.red_cons = 0
        row.outcome = SAT
        return row
    row.oracle_calls = result.oracle_calls
    row.time_ms = result.time_ms
    row.outcome = "iis" if result.complete else "timeout"
    row.verified = result.verified
    return row


def _cell(args):
    return run_cell(*args)


def run_benchmark(
    instances: Sequence[tuple[str, Model]],
    methods: Sequence[str] = BENCH_METHODS,
    limits: BenchLimits | None = None,
    workers: int = 1,
) -> list[RunStats]:
    """Rows come back in (instance, method) order whatever ``workers`` is."""
    limits = limits or BenchLimits()
    for m in methods:
        if m not in BENCH_METHODS:
            raise ValueError(f"unknown method {m!r}; choose from {BENCH_METHODS}")
    cells = [(name, model, method, limits) for name, model in instances for method in methods]
    if workers > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_cell, cells))
    return [_cell(c) for c in cells]


def summarize(rows: Iterable[RunStats]) -> list[dict]:
    by_method: dict[str, list[RunStats]] = {}
    for row in rows:
        by_method.setdefault(row.method, []).append(row)
    out = []
    for method, group in by_method.items():
        solved = [r for r in group if r.outcome in ("unsat", "iis")]
        out.append(
            {
                "method": method,
                "runs": len(group),
                "solved": len(solved),
                "median_time_ms": statistics.median(r.time_ms for r in solved) if solved else 0.0,
                "median_oracle_calls": (
                    statistics.median(r.oracle_calls for r in solved) if solved else 0
                ),
                "mean_reduction_pct": (
                    100 * statistics.fmean(r.reduction for r in solved) if solved else 0.0
                ),
                "verified": sum(1 for r in group if r.verified),
            }
        )
    return out


def write_csv(rows: Iterable[RunStats], fh: TextIO, timing: bool = True) -> None:
    writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row.as_row(timing))


def write_summary_csv(summary: Iterable[dict], fh: TextIO, timing: bool = True) -> None:
    writer = csv.DictWriter(fh, fieldnames=SUMMARY_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for entry in summary:
        entry = dict(entry)
        entry["median_time_ms"] = f"{entry['median_time_ms']:.3f}" if timing else ""
        entry["mean_reduction_pct"] = f"{entry['mean_reduction_pct']:.2f}"
        writer.writerow(entry)


def csv_text(rows: Iterable[RunStats], timing: bool = True) -> str:
    buf = io.StringIO()
    write_csv(rows, buf, timing)
    return buf.getvalue()
