"""Runtime and word length of the orbit reduction against n and coordinate size.

    python scripts/orbit_timing.py --n 3 4 6 --bounds 5 50 500 --count 50
"""

import argparse
import statistics
import time

import numpy as np

from symcone import isometry as iso
from symcone.lattice import build_surface_model, is_primitive


def random_primitive(model, rng, bound):
    while True:
        x = np.array([0, 0] + [int(v) for v in rng.integers(-bound, bound + 1, model.rank - 2)],
                     dtype=object)
        if is_primitive(model, x):
            return x


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, nargs="+", default=[3, 4])
    p.add_argument("--bounds", type=int, nargs="+", default=[5, 50])
    p.add_argument("--count", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()

    print(f"{'n':>3} {'bound':>6} {'median ms':>10} {'max ms':>8} {'median word':>12} {'max |entry|':>14}")
    for n in args.n:
        model = build_surface_model(n)
        for bound in args.bounds:
            rng = np.random.default_rng([args.seed, n, bound])
            times, lengths, sizes = [], [], []
            for _ in range(args.count):
                x = random_primitive(model, rng, bound)
                start = time.perf_counter()
                g = iso.map_to_RT(model, x)
                times.append(1000 * (time.perf_counter() - start))
                lengths.append(len(g.word))
                sizes.append(max(abs(int(v)) for v in g.matrix.flat))
            print(f"{n:>3} {bound:>6} {statistics.median(times):>10.2f} {max(times):>8.2f} "
                  f"{statistics.median(lengths):>12} {max(sizes):>14}")


if __name__ == "__main__":
    main()
