"""Rebuild a kernel from a sampling-only oracle and report per-entry z-scores.

    python scripts/representation_mc.py --size 4 --trials 1000000 --seed 7
"""

import argparse

import numpy as np

from measurekit import FiniteSpace, GeneralizedObservable, observable_from_experiment
from measurekit.harness import SamplingConfig, monte_carlo_oracle


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--size", type=int, default=4)
    parser.add_argument("--trials", type=int, default=1_000_000)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    k = rng.random((args.size, args.size))
    k /= k.sum(axis=0)
    omega = FiniteSpace(tuple(f"w{i}" for i in range(args.size)))
    theta = FiniteSpace(tuple(f"t{i}" for i in range(args.size)))
    obs = GeneralizedObservable(omega, theta, k)

    cfg = SamplingConfig(trials=args.trials, seed=args.seed)
    est = observable_from_experiment(
        monte_carlo_oracle(obs, cfg), n_checks=5, affinity_tol=0.01, renormalize=True
    )
    z = (est.kernel - k) / np.sqrt(k * (1 - k) / args.trials)
    np.set_printoptions(precision=3, suppress=True)
    print("true kernel\n", k)
    print("estimated kernel\n", est.kernel)
    print("z-scores\n", z)
    print(f"max |z| = {np.abs(z).max():.2f}  ({'within' if np.abs(z).max() <= 4 else 'outside'} 4 sigma)")


if __name__ == "__main__":
    main()
