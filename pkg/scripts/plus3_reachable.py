"""Census of FI pure-state conversions from the uniform qutrit over a grid of targets."""
import argparse
from collections import Counter

import numpy as np

from cohere.demos import plus3_expected, qutrit_grid
from cohere.states import plus_state, pure
from cohere.transforms import fio_pure_to_pure


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--points", type=int, default=1000)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    plus3 = plus_state(3)
    verdicts = Counter()
    feasible_classes = Counter()
    mismatches = 0
    for phi in qutrit_grid(args.points, args.seed):
        plan = fio_pure_to_pure(plus3, pure(phi))
        verdicts[plan.verdict.value] += 1
        if plan.feasible:
            key = tuple(round(float(x), 6) for x in np.sort(np.abs(phi) ** 2)[::-1])
            feasible_classes[key] += 1
        mismatches += plan.feasible != plus3_expected(phi)
    print("verdicts:", dict(verdicts))
    print("feasible targets by sorted populations:")
    for key, n in sorted(feasible_classes.items()):
        print(f"  {key}: {n}")
    print("mismatches against the three-class rule:", mismatches)


if __name__ == "__main__":
    main()
