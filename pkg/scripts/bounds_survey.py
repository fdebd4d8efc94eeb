"""How tight are the spectral purity bounds on random channels and subspaces?

For each instance prints the global and subspace lower bounds, the optimizer
minimum over the subspace, and the Haar-average upper bound.
"""
import argparse

import numpy as np

from channel_lab.channel import random_channel, random_unital_channel
from channel_lab.hamiltonian import purity_hamiltonian
from channel_lab.optimizer import OptimizerConfig, minimize_product_expectation
from channel_lab.purity import purity_bounds
from channel_lab.tensor import SubspaceBasis, gram_schmidt


def main():
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--instances", type=int, default=20)
    parser.add_argument("--dim", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--unital", action="store_true", help="random unitary mixtures only")
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    d = args.dim
    slack_global, slack_sub = [], []
    print(f"{'k':>2} {'dimC':>4} {'lower_global':>12} {'lower_sub':>10} {'minimum':>10} {'upper':>10}")
    for _ in range(args.instances):
        k = int(rng.integers(1, d + 2))
        t = random_unital_channel(d, k, rng) if args.unital else random_channel(d, k, rng)
        m = int(rng.integers(1, d + 1))
        g = rng.standard_normal((d, m)) + 1j * rng.standard_normal((d, m))
        c = SubspaceBasis(gram_schmidt(g))
        omega = purity_hamiltonian(t)
        b = purity_bounds(t, c, omega)
        low = minimize_product_expectation(omega, c, OptimizerConfig(restarts=8, seed=args.seed)).value
        slack_global.append(low - b.lower_global)
        slack_sub.append(low - b.lower_subspace)
        print(f"{k:2d} {m:4d} {b.lower_global:12.6f} {b.lower_subspace:10.6f} {low:10.6f} {b.upper:10.6f}")
    print(f"mean gap to minimum: global {np.mean(slack_global):.4f}, subspace {np.mean(slack_sub):.4f}")


if __name__ == "__main__":
    main()
