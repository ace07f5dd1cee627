#!/usr/bin/env python3
"""Telemetry sweep over requested digits on the quartic ground state.

Records term counts, observed cancellation and wall time per evaluation;
N grows linearly with P and the observed loss sits at P/2 for this
potential.
"""

import argparse
import sys

from hpse.cli import main as hpse_main


def run():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p-list", default="500,1000,2000,4000")
    ap.add_argument("--out", default="telemetry_sweep.csv")
    args = ap.parse_args()
    return hpse_main([
        "bench", "--M", "2", "--s", "1", "--v", "0,0",
        "--p-list", args.p_list, "--out", args.out,
    ])


if __name__ == "__main__":
    sys.exit(run())
