"""Shot-noise error of the three-qubit GHZ witness against the shot count."""

import argparse

import numpy as np

from stabwit.sampling import estimate_observable
from stabwit.scheduler import min_settings
from stabwit.states import ghz_state, noisy_mixture
from stabwit.witness import Family, WitnessSpec, build, evaluate


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=float, default=0.3)
    ap.add_argument("--seeds", type=int, default=20)
    args = ap.parse_args()
    w = build(WitnessSpec(Family.GHZ3_EXPANDED, 3))
    plan = min_settings(w.strings)
    rho = noisy_mixture(ghz_state(3), args.p)
    exact = evaluate(w, rho)
    print(f"exact value {exact:.6f} at p={args.p}")
    print(f"{'shots':>8} {'mean stderr':>12} {'rms error':>10}")
    for shots in (100, 400, 1600, 6400, 25600):
        ests = [estimate_observable(w, plan, rho, shots, seed) for seed in range(args.seeds)]
        stderr = np.mean([e.stderr for e in ests])
        rms = np.sqrt(np.mean([(e.mean - exact) ** 2 for e in ests]))
        print(f"{shots:>8} {stderr:>12.5f} {rms:>10.5f}")


if __name__ == "__main__":
    main()
