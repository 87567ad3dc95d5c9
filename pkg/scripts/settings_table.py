"""Minimum local measurement settings per witness and graph."""

import argparse

from stabwit.scheduler import min_settings
from stabwit.stabilizer import GraphSpec
from stabwit.witness import Family, WitnessSpec, build


def report(name: str, spec: WitnessSpec) -> None:
    plan = min_settings(build(spec).strings)
    flag = "optimal" if plan.optimal else "greedy"
    print(f"{name:<18} {plan.n_settings:>2}  {flag:<8} {' '.join(s.label for s in plan.settings)}")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-max", type=int, default=8)
    args = ap.parse_args()
    report("mermin3", WitnessSpec(Family.MERMIN3, 3))
    for n in range(2, args.n_max + 1):
        for family in (Family.GHZ, Family.CLUSTER):
            report(f"{family.value}-{n}", WitnessSpec(family, n))
    for n in range(3, min(args.n_max, 6) + 1):
        for name, g in (("ring", GraphSpec.ring(n)), ("star", GraphSpec.star(n)), ("complete", GraphSpec.complete(n))):
            report(f"{name}-{n}", WitnessSpec.for_graph(g))


if __name__ == "__main__":
    main()
