#!/usr/bin/env python3
"""Block-length trend for the binning simulator.

Runs the built-in trend fixture (correlated encoder-side state XORed into
the main channel, memoryless tap) across a ladder of block lengths and
reports decoding error against the Wilson interval plus the equivocation
ratio. Error should fall and the ratio should climb toward 1 as the block
grows; the constant-tap baseline pins the ratio at exactly 1.

Writes trend.csv with one row per block length.
"""

import argparse
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from wiretapsi import SimConfig, run_experiment  # noqa: E402
from wiretapsi.modelio import write_csv  # noqa: E402
from wiretapsi.reference import constant_wiretap_instance, trend_instance  # noqa: E402


def run_ladder(model, policy, lengths, rate, eps, trials, seed):
    rows = []
    for n in lengths:
        config = SimConfig(model=model, policy=policy, n=n, rate=rate,
                           epsilon_typ=eps, trials=trials, seed=seed)
        report = run_experiment(config)
        lo, hi = report.pe_ci95
        rows.append((n, report.pe, lo, hi, report.d, report.fallback_rate))
        print(f"  n={n:3d}  Pe={report.pe:.4f} [{lo:.4f}, {hi:.4f}]  "
              f"d={report.d:.4f}  fallback={report.fallback_rate:.4f}")
    return rows


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--trials", type=int, default=2000)
    parser.add_argument("--rate", type=float, default=0.17)
    parser.add_argument("--eps", type=float, default=0.45,
                        help="typicality slack")
    parser.add_argument("--seed", type=int, default=20260815)
    parser.add_argument("--max-n", type=int, default=12,
                        help="largest block length (capped at 16)")
    parser.add_argument("--baseline", action="store_true",
                        help="also run the constant-tap baseline")
    parser.add_argument("--out", type=str, default="trend_out")
    args = parser.parse_args()

    os.makedirs(args.out, exist_ok=True)
    # block must be long enough for at least two bins at this rate
    lengths = [n for n in range(4, args.max_n + 1, 2)
               if int(n * args.rate) >= 1]

    print("trend fixture (hidden tap sees a plain binary symmetric channel):")
    model, policy = trend_instance()
    rows = run_ladder(model, policy, lengths, args.rate, args.eps,
                      args.trials, args.seed)
    write_csv(os.path.join(args.out, "trend.csv"),
              ("n", "pe", "pe_ci_low", "pe_ci_high", "d", "fallback"), rows)

    if args.baseline:
        # tap output carries no information, so d must be exactly 1
        print("constant-tap baseline:")
        base_model, base_policy = constant_wiretap_instance()
        base_rows = run_ladder(base_model, base_policy, lengths, 0.25,
                               args.eps, max(args.trials // 4, 50), args.seed)
        write_csv(os.path.join(args.out, "baseline.csv"),
                  ("n", "pe", "pe_ci_low", "pe_ci_high", "d", "fallback"),
                  base_rows)
    print(f"wrote CSVs to {args.out}/")
    return 0


if __name__ == "__main__":
    sys.exit(main())
