"""Write the closeness, gain and validation figures (CSV + SVG) to a directory.

    python3 scripts/reproduce_figures.py [OUT_DIR] [TRIALS]

A thin wrapper around ``nncoop figures`` with seed 12345 and the default
-10..20 dB grid.
"""
import sys

from nncoop.cli import main

if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "figures"
    trials = sys.argv[2] if len(sys.argv) > 2 else "20000"
    sys.exit(main(["figures", "--out", out, "--trials", trials, "--seed", "12345"]))
