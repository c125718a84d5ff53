"""How certificate size grows as the tolerance shrinks.

For one class, certify at eps = 2^-k and report the escalation parameter C,
the scale A, the inflation scale N, the word length and the serialized size.

    python scripts/epsilon_scaling.py --n 4 --kmax 24
"""

import argparse
from fractions import Fraction

import numpy as np

from symcone import certio
from symcone.certifier import certify, pullback_distance
from symcone.sampling import random_certifiable_class
from symcone.lattice import build_surface_model


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--kmax", type=int, default=20)
    args = p.parse_args()

    model = build_surface_model(args.n)
    omega = random_certifiable_class(model, np.random.default_rng(args.seed))
    print("class:", certio.format_vector(omega))
    print(f"{'k':>3} {'C':>9} {'A':>12} {'N':>14} {'word':>5} {'bytes':>7} {'dist*2^k':>9}")
    for k in range(2, args.kmax + 1, 2):
        eps = Fraction(1, 2**k)
        cert = certify(model, omega, eps)
        r = cert.trace
        size = len(certio.serialize(cert))
        print(f"{k:>3} {r.C:>9} {str(r.A):>12} {str(cert.N):>14} {len(cert.g.word):>5} {size:>7} "
              f"{float(pullback_distance(cert) / eps):>9.4f}")


if __name__ == "__main__":
    main()
