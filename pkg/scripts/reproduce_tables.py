#!/usr/bin/env python3
"""Regenerate every case-study output table into an output directory.

Thin wrapper over ``regretalloc reproduce`` so the whole artifact can be
rebuilt with one command:

    python scripts/reproduce_tables.py --out out/tables --reps 100000
"""

import argparse
import sys

from regretalloc.cli import main as cli_main


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--config", default=None, help="scenario config (default: bundled)")
    parser.add_argument("--out", default="out/tables")
    parser.add_argument("--reps", type=int, default=0, help="Monte Carlo columns for table5")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    argv = ["reproduce", "--out", args.out, "--reps", str(args.reps), "--seed", str(args.seed)]
    if args.config:
        argv += ["--config", args.config]
    return cli_main(argv)


if __name__ == "__main__":
    sys.exit(main())
