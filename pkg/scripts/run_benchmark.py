"""Run every method over a scheduling suite and print the comparison tables.

Writes the per-cell CSV and the per-method summary CSV, then prints the
method comparison (median time and oracle calls) and the search statistics
per instance.

    python3 scripts/run_benchmark.py --count 30 --out results/
    python3 scripts/run_benchmark.py --manifest suite.json --methods csea,csea+qx,qx
"""

from __future__ import annotations

import argparse
import statistics
from dataclasses import asdict, dataclass
from pathlib import Path

from pbiis.bench import BENCH_METHODS, BenchLimits, run_benchmark, summarize, write_csv, write_summary_csv
from pbiis.schedule import benchmark_suite, generate_instance, load_manifest


@dataclass
class ExperimentConfig:
    count: int = 30
    seed: int = 0
    size: str = "ci"
    manifest: str | None = None
    methods: tuple[str, ...] = BENCH_METHODS
    memo: bool = False
    learning: bool = True
    time_limit_ms: float | None = 60_000.0
    workers: int = 1
    out: str = "results"


def parse_args() -> ExperimentConfig:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    defaults = ExperimentConfig()
    ap.add_argument("--count", type=int, default=defaults.count)
    ap.add_argument("--seed", type=int, default=defaults.seed)
    ap.add_argument("--size", choices=("ci", "large"), default=defaults.size)
    ap.add_argument("--manifest", help="use this manifest instead of generating a suite")
    ap.add_argument("--methods", default=",".join(defaults.methods))
    ap.add_argument("--memo", action="store_true", help="enable the oracle memo cache")
    ap.add_argument("--no-learning", action="store_true")
    ap.add_argument("--time-limit-ms", type=float, default=defaults.time_limit_ms)
    ap.add_argument("--workers", type=int, default=defaults.workers)
    ap.add_argument("--out", default=defaults.out)
    a = ap.parse_args()
    return ExperimentConfig(
        count=a.count,
        seed=a.seed,
        size=a.size,
        manifest=a.manifest,
        methods=tuple(m.strip() for m in a.methods.split(",") if m.strip()),
        memo=a.memo,
        learning=not a.no_learning,
        time_limit_ms=a.time_limit_ms,
        workers=a.workers,
        out=a.out,
    )


def main():
    cfg = parse_args()
    params = load_manifest(cfg.manifest) if cfg.manifest else benchmark_suite(cfg.count, cfg.seed, cfg.size)
    instances = [(p.label, generate_instance(p)) for p in params]
    rows = run_benchmark(
        instances,
        cfg.methods,
        BenchLimits(time_limit_ms=cfg.time_limit_ms, memo=cfg.memo, learning=cfg.learning),
        workers=cfg.workers,
    )
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "runs.csv", "w", newline="") as fh:
        write_csv(rows, fh)
    summary = summarize(rows)
    with open(out / "summary.csv", "w", newline="") as fh:
        write_summary_csv(summary, fh)

    print("config:", asdict(cfg))
    print(f"\n{'method':<10} {'solved':>8} {'median ms':>11} {'median calls':>13} {'reduction %':>12}")
    for s in summary:
        print(
            f"{s['method']:<10} {s['solved']:>4}/{s['runs']:<3} {s['median_time_ms']:>11.1f} "
            f"{s['median_oracle_calls']:>13} {s['mean_reduction_pct']:>12.2f}"
        )
    by = {s["method"]: s for s in summary}
    if "csea+qx" in by and "qx" in by and by["qx"]["median_time_ms"] > 0:
        ratio = by["csea+qx"]["median_time_ms"] / by["qx"]["median_time_ms"]
        print(f"\ncsea+qx / qx median time ratio: {ratio:.3f}")

    search = [r for r in rows if r.method == "csea"]
    if search:
        print(f"\n{'instance':<10} {'cons':>6} {'vars':>6} {'avglit':>7} {'red':>5} "
              f"{'confl':>6} {'dec':>6} {'bt':>6} {'learn':>6} {'maxdl':>6}")
        for r in search:
            print(f"{r.instance:<10} {r.cons:>6} {r.vars:>6} {r.avg_lit:>7.2f} {r.red_cons:>5} "
                  f"{r.conflicts:>6} {r.decisions:>6} {r.backtracks:>6} {r.learned:>6} {r.max_dl:>6}")
        print(f"\nmean core reduction: {100 * statistics.fmean(r.reduction for r in search):.2f}%")
    print(f"\nwrote {out / 'runs.csv'} and {out / 'summary.csv'}")


if __name__ == "__main__":
    main()
