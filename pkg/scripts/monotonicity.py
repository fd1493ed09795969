"""Largest observed increase of each coherence measure under random GI maps."""
import argparse

from cohere.measures import (
    dephasing_distance,
    l1_coherence,
    min_distance_coherence,
    monotonicity_harness,
    rel_entropy_coherence,
    wigner_yanase,
)

MEASURES = {
    "relative entropy": (rel_entropy_coherence, True),
    "l1": (l1_coherence, True),
    "dephasing p=1": (lambda r: dephasing_distance(r, 1), True),
    "dephasing p=2": (lambda r: dephasing_distance(r, 2), True),
    "min distance p=2": (lambda r: min_distance_coherence(r, 2), True),
    "min distance p=1": (lambda r: min_distance_coherence(r, 1), False),
    "Wigner-Yanase": (wigner_yanase, True),
}


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=500)
    parser.add_argument("--dim", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--with-slow", action="store_true", help="include the trace-norm minimization")
    args = parser.parse_args()

    print(f"{'measure':<18} {'G2 max increase':>16} {'average (selective) max increase':>34}")
    for name, (f, fast) in MEASURES.items():
        if not fast and not args.with_slow:
            continue
        rep = monotonicity_harness(f, trials=args.trials, d=args.dim, seed=args.seed, selective=True)
        print(f"{name:<18} {rep.max_violation:>16.3e} {rep.max_violation_average:>34.3e}")


if __name__ == "__main__":
    main()
