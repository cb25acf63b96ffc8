"""Random mixed spaces: how often each route says Member, and whether the two routes agree."""
import argparse
from collections import Counter

import numpy as np

from schattenlab.multiplication_rep import Inconclusive, classify_exact, classify_numeric
from schattenlab.random_models import mixed_space, simple_function


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--samples", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--p", type=float, nargs="+", default=[1.0, 2.0, 3.0])
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    tally = Counter()
    for _ in range(args.samples):
        space = mixed_space(rng)
        f = simple_function(rng, space)
        for p in args.p:
            exact = classify_exact(space, f, p)
            try:
                numeric = classify_numeric(space, f, p)
            except Inconclusive:
                tally["inconclusive"] += 1
                continue
            tally[type(exact).__name__] += 1
            tally["agree" if type(exact) is type(numeric) else "disagree"] += 1
    for k in ("Member", "NotMember", "agree", "disagree", "inconclusive"):
        print(f"{k:>13}: {tally[k]}")


if __name__ == "__main__":
    main()
