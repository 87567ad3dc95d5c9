"""Noise thresholds of every witness family against their closed forms."""

import argparse
import csv
import sys

from stabwit.witness import Family, WitnessSpec, noise_threshold

FAMILIES = [Family.GHZ, Family.GHZ_PRIME, Family.CLUSTER, Family.CLUSTER_PRIME, Family.PROJECTOR]


def rows(n_max: int):
    yield from ((f, 3) for f in (Family.GHZ3_EXPANDED, Family.MERMIN3))
    for n in range(3, n_max + 1):
        for f in FAMILIES:
            yield f, n


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-max", type=int, default=10)
    args = ap.parse_args()
    out = csv.writer(sys.stdout)
    out.writerow(["family", "n", "p_threshold", "closed_form", "difference"])
    for family, n in rows(args.n_max):
        r = noise_threshold(WitnessSpec(family, n))
        diff = "" if r.difference is None else f"{r.difference:.2e}"
        closed = "" if r.closed_form is None else f"{r.closed_form:.12f}"
        out.writerow([family.value, n, f"{r.p_threshold:.12f}", closed, diff])


if __name__ == "__main__":
    main()
