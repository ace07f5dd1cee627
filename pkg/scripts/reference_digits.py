#!/usr/bin/env python3
"""Reproduce the reference digit runs at desk scale.

Solves the pure-quartic ground state to the requested digits and writes the
raw digit file plus the result document.  The decimal-1000 block lands at
line 11, column 1 of the digit file (100 digits per line, integer digit
included in the first line's count).
"""

import argparse
import sys

from hpse.cli import main as hpse_main


def run():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--digits", type=int, default=1040)
    ap.add_argument("--n", type=int, default=0)
    ap.add_argument("--out", default="quartic_ground.txt")
    ap.add_argument("--json-out", default="quartic_ground.json")
    args = ap.parse_args()
    return hpse_main([
        "solve", "--M", "2", "--s", "1", "--v", "0,0",
        "--n", str(args.n), "--digits", str(args.digits),
        "--out", args.out, "--json-out", args.json_out,
    ])


if __name__ == "__main__":
    sys.exit(run())
