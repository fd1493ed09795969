"""Classify witness and random channels and check the family inclusions on every report."""
import argparse
from collections import Counter

import numpy as np

from cohere.channels import KrausChannel, random_channel, random_schur, schur_to_kraus
from cohere.families import FAMILIES, Verdict, classification_report, fio_not_sio_example, witness_channels


def random_fio(d, rng):
    form = rng.integers(0, d, size=d)
    n = int(max(np.bincount(form)))
    ops = np.zeros((n, d, d), dtype=complex)
    for r in set(form.tolist()):
        cols = np.flatnonzero(form == r)
        g = rng.normal(size=(n, len(cols))) + 1j * rng.normal(size=(n, len(cols)))
        q = np.linalg.qr(g)[0]
        for j, x in enumerate(cols):
            ops[:, r, x] = q[:, j]
    return KrausChannel(tuple(ops))


def check(rep):
    v = rep.verdicts
    yes = {Verdict.YES, Verdict.WITNESS_YES}
    rules = {
        "GIO<FIO": v["GIO"] != Verdict.YES or v["FIO"] == Verdict.YES,
        "GIO<TIO": v["GIO"] != Verdict.YES or v["TIO"] == Verdict.YES,
        "FIO<DIO": v["FIO"] != Verdict.YES or v["DIO"] == Verdict.YES,
        "DIO<MIO": v["DIO"] != Verdict.YES or v["MIO"] == Verdict.YES,
        "SIO<DIO": v["SIO"] not in yes or v["DIO"] == Verdict.YES,
        "IO<MIO": v["IO"] not in yes or v["MIO"] == Verdict.YES,
    }
    return [k for k, ok in rules.items() if not ok]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--samples", type=int, default=200)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    witnesses = dict(witness_channels(), fio_not_sio=fio_not_sio_example())
    print(f"{'witness':<18}" + "".join(f"{f:>11}" for f in FAMILIES))
    for name, ch in witnesses.items():
        rep = classification_report(ch)
        print(f"{name:<18}" + "".join(f"{rep[f].value:>11}" for f in FAMILIES))

    rng = np.random.default_rng(args.seed)
    broken = Counter()
    tallies = {kind: Counter() for kind in ("gio", "fio", "generic")}
    for _ in range(args.samples):
        d = int(rng.integers(2, 5))
        for kind, ch in (
            ("gio", schur_to_kraus(random_schur(d, seed=rng))),
            ("fio", random_fio(d, rng)),
            ("generic", random_channel(d, 2, seed=rng)),
        ):
            rep = classification_report(ch)
            broken.update(check(rep))
            tallies[kind].update(f for f in FAMILIES if rep[f] in (Verdict.YES, Verdict.WITNESS_YES))
    print()
    for kind, tally in tallies.items():
        print(f"{kind:<8} members per family: {dict(sorted(tally.items()))}")
    print("inclusion violations:", dict(broken) or "none")


if __name__ == "__main__":
    main()
