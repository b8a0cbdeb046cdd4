"""Write a benchmark manifest (JSON list of ScheduleParams).

    python3 scripts/make_suite.py --count 30 --seed 0 --size ci --out suite.json
"""

import argparse

from pbiis.schedule import benchmark_suite, save_manifest


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--count", type=int, default=30)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--size", choices=("ci", "large"), default="ci")
    ap.add_argument("--out", default="suite.json")
    args = ap.parse_args()
    suite = benchmark_suite(args.count, args.seed, args.size)
    save_manifest(suite, args.out)
    print(f"wrote {len(suite)} instances to {args.out}")


if __name__ == "__main__":
    main()
