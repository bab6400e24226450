#!/usr/bin/env python3
"""Case study for the Gaussian channel pair: where does leakage live?

For both state couplings (fully correlated states and independent states)
this sweeps the precoding coefficient, locates the zero-leakage roots and
the leakage maximizer, prints the power thresholds that separate the three
boundary regimes, and writes region boundaries for a ladder of powers.

Outputs (in --out):
  sweep_correlated.csv / sweep_independent.csv   alpha sweeps
  boundary_correlated.csv / boundary_independent.csv  (P, R, Rd_cap) rows
"""

import argparse
import os
import sys

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from wiretapsi import (  # noqa: E402
    alpha_star,
    case1_region,
    case1_thresholds,
    case2_region,
    case2_thresholds,
    leakage_roots,
    main_capacity,
)
from wiretapsi.gaussian import case1_params, case2_params, leakage_curve  # noqa: E402
from wiretapsi.modelio import write_csv  # noqa: E402


def sweep(params, alphas):
    return list(zip(alphas.tolist(), leakage_curve(params, alphas).tolist()))


def describe(tag, params, thresholds, p, q, n1, n2):
    star = alpha_star(params)
    neg, pos = leakage_roots(params)
    print(f"--- {tag} states, P={p}, Q={q}, N1={n1}, N2={n2}")
    print(f"  thresholds: {thresholds[0]:.6f} / {thresholds[1]:.6f}")
    print(f"  main capacity: {main_capacity(p, n1):.6f} bits")
    print(f"  leakage maximizer alpha* = {star:.6f}")
    if neg is None:
        print("  leakage never positive: no roots")
    else:
        print(f"  zero-leakage roots: {neg:.6f}, {pos:.6f}")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--p", type=float, default=1.0, help="input power")
    parser.add_argument("--q", type=float, default=1.0, help="state power")
    parser.add_argument("--n1", type=float, default=0.25)
    parser.add_argument("--n2", type=float, default=1.0)
    parser.add_argument("--grid", type=int, default=64,
                        help="boundary samples per power")
    parser.add_argument("--out", type=str, default="case_study_out")
    args = parser.parse_args()

    os.makedirs(args.out, exist_ok=True)
    alphas = np.arange(-2.0, 2.0001, 0.01)
    p, q, n1, n2 = args.p, args.q, args.n1, args.n2

    cases = (
        ("correlated", case1_params(p, q, n1, n2),
         case1_thresholds(q, n1, n2), case1_region),
        ("independent", case2_params(p, q, n1, n2),
         case2_thresholds(q, n1, n2), case2_region),
    )
    for tag, params, thresholds, region_fn in cases:
        describe(tag, params, thresholds, p, q, n1, n2)
        write_csv(os.path.join(args.out, f"sweep_{tag}.csv"),
                  ("alpha", "deltaI"), sweep(params, alphas))

        # a power ladder across all three regimes, thresholds included
        lo, hi = thresholds
        powers = sorted({0.5 * lo, lo, 0.5 * (lo + hi), hi, 1.5 * hi, 2.5 * hi})
        rows = []
        for power in powers:
            if power <= 0:
                continue
            region = region_fn(power, q, n1, n2, grid_size=args.grid)
            rows.extend((power, region.regime, r, cap)
                        for r, cap in region.boundary)
            print(f"  P={power:.4f}: regime {region.regime}, "
                  f"cap at R=0 is {region.boundary[0][1]:.6f}")
        write_csv(os.path.join(args.out, f"boundary_{tag}.csv"),
                  ("P", "regime", "R", "Rd_cap"), rows)
    print(f"wrote CSVs to {args.out}/")
    return 0


if __name__ == "__main__":
    sys.exit(main())
