#!/usr/bin/env python3
"""Run the simulation sweeps and write CSV + SVG outputs.

Scaled presets run in minutes on a laptop; pass --paper-scale for the full
grids (hours).
"""

import argparse
import sys
import time

from mlmmsb.io_cli import cli_main

SCALED = ["exp1-scaled", "exp2-scaled", "exp3-scaled", "exp4-scaled"]
PAPER = ["exp1", "exp2", "exp3", "exp4"]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--paper-scale", action="store_true")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out-dir", default="results")
    args = parser.parse_args()
    presets = PAPER if args.paper_scale else SCALED
    for name in presets:
        t0 = time.time()
        code = cli_main(
            [
                "experiment",
                "--preset", name,
                "--seed", str(args.seed),
                "--out-dir", args.out_dir,
            ]
        )
        if code != 0:
            return code
        print(f"{name}: done in {time.time() - t0:.1f}s")
    return 0


if __name__ == "__main__":
    sys.exit(main())
