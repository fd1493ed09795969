"""Optimal stochastic GI conversion probabilities around a three-state cycle."""
import argparse
import itertools

import numpy as np

from cohere.states import plus_state, pure
from cohere.transforms import sgio_optimal_probability

STATES = {
    "chi": pure(np.sqrt([1 / 2, 1 / 4, 1 / 4])),
    "plus3": plus_state(3),
    "psi": pure(np.sqrt([1 / 4, 5 / 8, 1 / 8])),
}


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--random", type=int, default=0, help="also sample this many random qutrit triples")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    print(f"{'source':>6} -> {'target':<6}  probability")
    for a, b in itertools.permutations(STATES, 2):
        p = sgio_optimal_probability(STATES[a], STATES[b]).probability
        print(f"{a:>6} -> {b:<6}  {p:.6f}")

    if args.random:
        rng = np.random.default_rng(args.seed)
        cyclic = 0
        for _ in range(args.random):
            trio = [pure(np.sqrt(rng.dirichlet(np.ones(3)))) for _ in range(3)]
            wins = [
                sgio_optimal_probability(trio[i], trio[(i + 1) % 3]).probability
                > sgio_optimal_probability(trio[(i + 1) % 3], trio[i]).probability
                for i in range(3)
            ]
            cyclic += all(wins) or not any(wins)
        print(f"\n{cyclic}/{args.random} random triples form a preference cycle")


if __name__ == "__main__":
    main()
