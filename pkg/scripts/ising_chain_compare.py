"""Compare the Ising-chain output with the cluster state and find the local fix."""

import argparse
import json

from stabwit.stabilizer import cluster_generators
from stabwit.states import cluster_state, ising_chain_evolution, local_correction


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-max", type=int, default=8)
    args = ap.parse_args()
    for n in range(2, args.n_max + 1):
        evolved = ising_chain_evolution(n)
        rep = local_correction(evolved, cluster_generators(n))
        record = {"n": n, "fidelity_before": evolved.fidelity(cluster_state(n)), **rep.to_json()}
        print(json.dumps(record, sort_keys=True))


if __name__ == "__main__":
    main()
