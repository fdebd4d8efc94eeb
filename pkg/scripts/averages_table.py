"""Haar-averaged purity and fidelity: closed forms against Monte-Carlo estimates."""
import argparse

import numpy as np

from channel_lab.channel import (
    correlated_pauli2,
    depolarizing,
    partial_replacement,
    pauli,
    projective,
    unitary_mixture,
)
from channel_lab.purity import average_fidelity, average_purity, monte_carlo_average
from channel_lab.tensor import haar_random_unitary


def channels():
    return [
        pauli([0.7, 0.1, 0.1, 0.1]),
        depolarizing(0.25),
        correlated_pauli2([0.4, 0.3, 0.2, 0.1]),
        partial_replacement(2, 0.3),
        partial_replacement(4, 0.6),
        projective([np.diag([1, 1, 0, 0]), np.diag([0, 0, 1, 1])]),
        unitary_mixture([0.5, 0.5], [np.eye(3), haar_random_unitary(3, 0)]),
    ]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--samples", type=int, default=10_000)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    print(f"{'channel':<42} {'quantity':<9} {'analytic':>10} {'estimate':>10} {'stderr':>9} {'z':>6}")
    for t in channels():
        for quantity, closed in (("purity", average_purity), ("fidelity", average_fidelity)):
            exact = closed(t)
            est = monte_carlo_average(t, quantity, args.samples, args.seed)
            print(
                f"{t.label[:42]:<42} {quantity:<9} {exact:10.6f} {est.estimate:10.6f} "
                f"{est.stderr:9.2e} {est.zscore(exact):6.2f}"
            )


if __name__ == "__main__":
    main()
