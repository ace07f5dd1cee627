#!/usr/bin/env python3
"""Obtainable-precision scan: how many digits the boundary at x delivers.

Emits the x, p_obtained, p_est CSV for the ground state of a chosen
potential; the offset column p_obtained - p_est should be nearly constant
in x, which is what makes the a priori planning work.
"""

import argparse
import sys

from hpse.cli import main as hpse_main


def run():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--grid", default="6,8,10,12")
    ap.add_argument("--ref-digits", type=int, default=600)
    ap.add_argument("--out", default="precision_vs_x.csv")
    ap.add_argument("--M", type=int, default=2)
    ap.add_argument("--s", default="1")
    ap.add_argument("--v", default="0,0")
    args = ap.parse_args()
    return hpse_main([
        "scan-x", "--M", str(args.M), "--s", args.s, "--v", args.v,
        "--n", "0", "--x-grid", args.grid,
        "--ref-digits", str(args.ref_digits), "--out", args.out,
    ])


if __name__ == "__main__":
    sys.exit(run())
