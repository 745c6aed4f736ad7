#!/usr/bin/env python3
"""Sweep the ramp strength and print where the spectrum turns imaginary."""

import argparse

import numpy as np

from ramphop import LatticeParams, classify, solve_spectrum


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--length", type=int, default=100)
    parser.add_argument("--t", type=float, default=1.0)
    parser.add_argument("--gamma-min", type=float, default=0.0)
    parser.add_argument("--gamma-max", type=float, default=1.2)
    parser.add_argument("--steps", type=int, default=25)
    args = parser.parse_args()

    print(f"L = {args.length}, t = {args.t}")
    print(f"{'gamma':>10} {'n_real':>7} {'n_imag':>7} {'radius':>10}")
    for gamma in np.linspace(args.gamma_min, args.gamma_max, args.steps):
        params = LatticeParams(t=args.t, gamma=float(gamma), length=args.length)
        spec = solve_spectrum(params)
        cs = classify(spec)
        radius = float(np.max(np.abs(spec.eigenvalues)))
        print(
            f"{gamma:>10.4f} {cs.counts.n_real:>7} "
            f"{cs.counts.n_imaginary:>7} {radius:>10.4f}"
        )


if __name__ == "__main__":
    main()
