"""Minimal output purity of correlated two-qubit Pauli noise.

Compares the optimizer minimum with sum_a p_a^2 and prints the moduli of the
minimizer's Bell-basis amplitudes.
"""
import argparse

import numpy as np

from channel_lab.channel import correlated_pauli2
from channel_lab.hamiltonian import purity_hamiltonian
from channel_lab.optimizer import OptimizerConfig, minimize_product_expectation

S2 = np.sqrt(0.5)
BELL = {
    "phi+": [S2, 0, 0, S2],
    "phi-": [S2, 0, 0, -S2],
    "psi+": [0, S2, S2, 0],
    "psi-": [0, S2, -S2, 0],
}


def main():
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--trials", type=int, default=10, help="random probability vectors")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--restarts", type=int, default=16)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    bell = np.array(list(BELL.values()))
    probs = [np.full(4, 0.25)] + [rng.dirichlet(np.ones(4)) for _ in range(args.trials)]
    print(f"{'p':<34} {'min':>10} {'sum p^2':>10} {'gap':>9}  |<bell|psi>|")
    for p in probs:
        h = purity_hamiltonian(correlated_pauli2(p))
        res = minimize_product_expectation(h, cfg=OptimizerConfig(restarts=args.restarts, seed=args.seed))
        target = float(np.sum(p**2))
        amps = np.abs(bell @ res.state)
        print(
            f"{np.array2string(p, precision=3, suppress_small=True, floatmode='fixed'):<34} {res.value:10.6f} {target:10.6f} "
            f"{abs(res.value - target):9.1e}  {np.array2string(amps, precision=4)}"
        )


if __name__ == "__main__":
    main()
