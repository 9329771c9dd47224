"""Mean expanded nodes per (solver, w) for a set of maps, one column per w.

    python scripts/expansion_table.py synthetic:random-64 --n 50 --instances 10

Pass real MovingAI ``.map`` files for real benchmark numbers; the
synthetic maps only show the trend.
"""

import argparse
from fractions import Fraction
from pathlib import Path

from sstar.bench import BenchConfig, run_suite, summary_table


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("maps", nargs="*", default=["synthetic:random-64"])
    ap.add_argument("--n", type=int, nargs="+", default=[50])
    ap.add_argument("--w", nargs="+", default=["0", "1/4", "1/2", "3/4", "1"])
    ap.add_argument("--instances", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", type=Path, default=Path("results/expansion_table.csv"))
    args = ap.parse_args()
    cfg = BenchConfig(maps=args.maps, n_values=args.n, weights=[Fraction(w) for w in args.w],
                      instances=args.instances, seed=args.seed, jobs=args.jobs,
                      output=args.out)
    rows = run_suite(cfg)
    print(summary_table(rows), end="")
    print(f"rows: {args.out}")


if __name__ == "__main__":
    main()
