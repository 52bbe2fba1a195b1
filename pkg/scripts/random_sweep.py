#!/usr/bin/env python3
"""Batch-verify seeded random convex domains and summarize the margins.

Equivalent to `hsv sweep`, with a compact console summary at the end.
HSV_THREADS caps the worker count.
"""

import argparse

from hotspots.report import run_sweep


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--count", type=int, default=50)
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--h-rel", type=float, default=0.02,
                        help="mesh size relative to each domain's diameter")
    parser.add_argument("--out", default="sweep_out")
    args = parser.parse_args()

    summary = run_sweep(args.count, args.seed, args.h_rel, args.out)
    print(f"domains:             {args.count}")
    print(f"theorem passes:      {summary['pass_count']}")
    print(f"violations:          {summary['violation_count']}")
    print(f"strong-Kroeger true: {summary['strong_kroger_count']}")
    for name, value in summary["min_margins"].items():
        print(f"min {name}: {value:.6f}")
    if summary["failures"]:
        print(f"FAILURES: {summary['failures']}")


if __name__ == "__main__":
    main()
