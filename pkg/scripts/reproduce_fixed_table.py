#!/usr/bin/env python3
"""Recompute the fixed-parameter pooling comparison table cell by cell.

For each (prevalence, transmission, pool size) cell the engine reports the
percent sensitivity gain of the correlated-infection model over the
independent-infection model, and the percent reduction in tests per sample
versus individual testing.  Reference columns are the published values from
an external reference implementation of the same design method; deltas are
printed as measured, never absorbed.

Running with the default grid sweeps both tail calibrations and both
individual detection limits, which shows where the published table is and is
not reproducible (see the acceptance suite for the gating version).
"""

from __future__ import annotations

import argparse
import itertools
import sys

from pooldesign import (
    CtPopulation,
    DetectionCurve,
    ModelKind,
    PoolParams,
    evaluate_pool,
)

# (pi, tau, n) -> (% sensitivity increase vs independent-infection model,
#                  % fewer tests vs individual testing)
REFERENCE = {
    (0.002, 0.012, 5): (0.62, 79.35),
    (0.054, 0.012, 5): (0.57, 58.92),
    (0.002, 0.18, 5): (7.77, 79.31),
    (0.054, 0.18, 5): (7.11, 57.54),
    (0.002, 0.38, 5): (13.02, 79.28),
    (0.054, 0.38, 5): (11.85, 56.55),
    (0.002, 0.012, 20): (4.46, 92.63),
    (0.054, 0.012, 20): (3.12, 36.88),
    (0.002, 0.18, 20): (28.85, 92.07),
    (0.054, 0.18, 20): (17.87, 28.57),
    (0.002, 0.38, 20): (31.25, 92.02),
    (0.054, 0.38, 20): (19.14, 27.86),
}

INC_TOL = 3.0
DEC_TOL = 2.0


def parse_args() -> argparse.Namespace:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--lod", type=float, nargs="+", default=[35.0, 40.0],
                        help="individual detection limits (Ct) to sweep")
    parser.add_argument("--tail", type=float, nargs="+", default=[0.25, 0.30],
                        help="fractions of positives calibrated above Ct 35")
    parser.add_argument("--draws", type=int, default=100_000,
                        help="Monte Carlo draws per sensitivity cell")
    return parser.parse_args()


def main() -> int:
    args = parse_args()
    for lod, tail in itertools.product(args.lod, args.tail):
        pop = CtPopulation(tail_fraction=tail)
        curve = DetectionCurve.step(lod)
        print(f"\n=== detection limit {lod:g}, tail fraction {tail:g} ===")
        print(f"{'pi':>6} {'tau':>6} {'n':>3} | {'sens-inc%':>9} {'ref':>7} "
              f"{'delta':>7} | {'fewer%':>7} {'ref':>7} {'delta':>7}")
        inc_out = dec_out = 0
        for (pi, tau, n), (ref_inc, ref_dec) in REFERENCE.items():
            params = PoolParams(n, pi, tau)
            corr = evaluate_pool(params, ModelKind.correlated(), pop, curve, args.draws)
            null = evaluate_pool(params, ModelKind.null(), pop, curve, args.draws)
            inc = 100.0 * (corr.metrics.sensitivity - null.metrics.sensitivity) \
                / null.metrics.sensitivity
            dec = 100.0 * (1.0 - corr.metrics.tests_per_sample)
            inc_out += abs(inc - ref_inc) > INC_TOL
            dec_out += abs(dec - ref_dec) > DEC_TOL
            print(f"{pi:>6g} {tau:>6g} {n:>3d} | {inc:>9.2f} {ref_inc:>7.2f} "
                  f"{inc - ref_inc:>+7.2f} | {dec:>7.2f} {ref_dec:>7.2f} "
                  f"{dec - ref_dec:>+7.2f}")
        print(f"cells outside tolerance (±{INC_TOL:g} / ±{DEC_TOL:g} points): "
              f"sensitivity {inc_out}/12, fewer-tests {dec_out}/12")
    return 0


if __name__ == "__main__":
    sys.exit(main())
