"""Pilot run for the intermediate order statistic normality tolerance.

Brute force, independent of the package: full sorts of fresh samples,
hand-written centering/scale constants, and scipy's KS test. Prints the
KS distance for several seeds so the tolerance used in the tests can be
checked against the spread.

    python scripts/pilot_falk.py --reps 2000 --seeds 5
"""

import argparse
import math

import numpy as np
from scipy import stats


def rayleigh(rng, n, i):
    x = np.sort(rng.exponential(1.0, n))[n - i]
    a = math.log(n / i)
    b = math.sqrt(i) / (n * (i / n))
    return x, a, b


def pareto(rng, n, i, alpha=3.0):
    x = np.sort(rng.pareto(alpha, n))[n - i]  # numpy's pareto is the Lomax law 1 - (1+x)^-alpha
    a = (n / i) ** (1 / alpha) - 1
    f = alpha * (1 + a) ** (-(alpha + 1))
    b = math.sqrt(i) / (n * f)
    return x, a, b


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=100_000)
    ap.add_argument("--reps", type=int, default=2000)
    ap.add_argument("--seeds", type=int, default=5)
    args = ap.parse_args()
    i = math.ceil(math.sqrt(args.n))
    for name, draw in (("rayleigh", rayleigh), ("pareto3", pareto)):
        for seed in range(args.seeds):
            rng = np.random.default_rng(1000 + seed)
            z = []
            for _ in range(args.reps):
                x, a, b = draw(rng, args.n, i)
                z.append((x - a) / b)
            z = np.array(z)
            d = stats.kstest(z, "norm").statistic
            print(f"{name} seed={seed} n={args.n} i={i} reps={args.reps} "
                  f"mean={z.mean():+.4f} sd={z.std(ddof=1):.4f} ks={d:.4f}")


if __name__ == "__main__":
    main()
