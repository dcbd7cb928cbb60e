"""Width of the irreversible entropy bracket for the two-level example as entropy production shrinks."""
import argparse
import sys

import numpy as np

from entropometer.entropy import entropy_difference, irreversible_bound
from entropometer.interconnect import SePoint, TemperatureScale
from entropometer.processes import ModelState
from entropometer.spectra import harmonic, two_level


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--steps", type=int, default=9, help="sigma values from 1e-1 down by decades")
    args = parser.parse_args(argv)

    tl = two_level(1.0)
    a1, a2 = ModelState.canonical(tl, 1.0), ModelState.canonical(tl, 0.5)
    b = SePoint.from_beta(harmonic(1.0, 64), 1.0)
    scale = TemperatureScale.calibrated(b)
    exact = entropy_difference(a1, a2, b, scale).delta_S
    print(f"reversible dS = {exact:.15f}")
    print(f"{'sigma':>8s} {'lower':>18s} {'upper':>18s} {'width':>12s}")
    for sigma in np.logspace(-1, -args.steps, args.steps):
        br = irreversible_bound(a1, a2, b, sigma, b, sigma, scale)
        print(f"{sigma:8.0e} {br.lower:18.15f} {br.upper:18.15f} {br.width:12.3e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
