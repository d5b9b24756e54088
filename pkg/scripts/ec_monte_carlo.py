#!/usr/bin/env python3
"""Monte Carlo of the entangling-gate error-correction round.

Compares the success-conditioned residual variance with the posterior
prediction for a grid of signal/idler time-noise widths.

    python3 scripts/ec_monte_carlo.py --trials 100000 --seed 1 --workers 4
"""

import argparse

from tfgkp import error_correction as ec
from tfgkp.gkp import CombParams


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--widths", type=float, nargs="*", default=[0.03, 0.06, 0.09],
                   help="time-noise widths in round trips; all pairs are run")
    args = p.parse_args()

    comb = CombParams()
    print(f"{'a':>6} {'b':>6} {'success':>8} {'var/pred':>9}")
    for a in args.widths:
        for b in args.widths:
            noise = ec.NoiseModel("gaussian", a, b)
            s = ec.ec_monte_carlo(comb, noise, args.trials, args.seed, args.workers)
            print(f"{a:6.3f} {b:6.3f} {s.success_rate:8.4f} {s.posterior_consistency:9.4f}")
    print(f"decoding spacing pi/(2 fsr) = {ec.default_spacing(comb):.4f} round trips")


if __name__ == "__main__":
    main()
