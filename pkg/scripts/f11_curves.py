"""Tabulate interconnection curves with analytic and finite-difference slopes for a few auxiliary pairs as CSV."""
import argparse
import csv
import sys

import numpy as np

from entropometer.errors import StepUnderflowError
from entropometer.interconnect import SePoint, df11, f11, f11_domain
from entropometer.spectra import harmonic, random_spectrum, two_level

PAIRS = {
    "tl_to_osc": (SePoint.from_beta(two_level(1.0), 1.0), SePoint.from_beta(harmonic(1.0, 64), 1.0)),
    "osc_to_tl": (SePoint.from_beta(harmonic(1.0, 64), 1.0), SePoint.from_beta(two_level(1.0), 1.0)),
    "osc_hot_to_cold": (SePoint.from_beta(harmonic(0.5, 128), 0.2), SePoint.from_beta(harmonic(1.0, 64), 3.0)),
    "random_pair": (
        SePoint.from_beta(random_spectrum(3, 12, 0, 4), 0.7),
        SePoint.from_beta(random_spectrum(4, 20, 0, 6, max_degeneracy=3), 1.5),
    ),
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--points", type=int, default=200)
    parser.add_argument("-o", "--output", help="CSV path (default: stdout)")
    args = parser.parse_args(argv)

    out = open(args.output, "w", newline="") if args.output else sys.stdout
    writer = csv.writer(out)
    writer.writerow(["pair", "E_B", "E_C", "slope_analytic", "slope_fd"])
    for name, (b, c) in PAIRS.items():
        lo, hi = f11_domain(b, c)
        grid = np.linspace(lo, hi, args.points + 2)[1:-1]
        E_C = f11(b, c, grid)
        for e_b, e_c in zip(grid, E_C):
            try:
                fd = df11(b, c, float(e_b), "finite_difference")
            except StepUnderflowError:
                fd = float("nan")
            writer.writerow([name, repr(float(e_b)), repr(float(e_c)), repr(df11(b, c, float(e_b))), repr(fd)])
    if args.output:
        out.close()
    return 0


if __name__ == "__main__":
    sys.exit(main())
