"""Sampling reports over several n and seeds.

    python scripts/sample_sweep.py --n 3 4 5 --seeds 0 1 2 --count 200
"""

import argparse
import json
from fractions import Fraction

from symcone.sampling import sample_report


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, nargs="+", default=[3, 4])
    p.add_argument("--seeds", type=int, nargs="+", default=[0])
    p.add_argument("--count", type=int, default=200)
    p.add_argument("--bound", type=int, default=5)
    p.add_argument("--eps", default="1/1024")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--json", action="store_true")
    args = p.parse_args()

    rows = []
    for n in args.n:
        for seed in args.seeds:
            r = sample_report(n, args.count, seed, args.bound, Fraction(args.eps), workers=args.workers)
            rows.append(r.as_dict(timings=True))
    if args.json:
        print(json.dumps(rows, indent=2))
        return
    print(f"{'n':>3} {'seed':>5} {'certifiable':>11} {'certified':>9} {'conjectural':>11} "
          f"{'max dist':>12} {'seconds':>8}")
    for d in rows:
        print(f"{d['n']:>3} {d['seed']:>5} {d['certifiable']:>11} {d['certified']:>9} "
              f"{len(d['conjectural_not_certified']):>11} {str(d['max_distance']):>12} "
              f"{d['total_seconds']:>8.2f}")


if __name__ == "__main__":
    main()
