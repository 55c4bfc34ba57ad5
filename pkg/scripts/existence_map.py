#!/usr/bin/env python3
"""Number of real peakon amplitudes over a (k1, k2) grid at fixed speed c.

Prints a character map for the line and the circle ('.' none, '1' one,
'2' two roots) and writes the full table.
"""
import argparse
from pathlib import Path

import numpy as np

from peakonlab.cli import existence_row
from peakonlab.io import write_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--c", type=float, default=1.0)
    ap.add_argument("--n", type=int, default=21)
    ap.add_argument("--span", type=float, default=2.0)
    ap.add_argument("--out", default="out/existence_map")
    args = ap.parse_args()
    ks = np.linspace(-args.span, args.span, args.n)
    rows = [existence_row(k1, k2, args.c) for k2 in ks[::-1] for k1 in ks]
    write_csv(Path(args.out) / "existence_map.csv",
              ("k1", "k2", "c", "disc_line", "disc_circle", "n_roots_line", "n_roots_circle"), rows)
    glyph = {0: ".", 1: "1", 2: "2"}
    for col, name in ((5, "line"), (6, "circle")):
        print(f"{name}: rows k2 = {args.span:g} .. {-args.span:g}, columns k1 = {-args.span:g} .. {args.span:g}")
        for i in range(args.n):
            print("  " + "".join(glyph[int(r[col])] for r in rows[i * args.n:(i + 1) * args.n]))
    frac = np.mean([r[5] > 0 for r in rows]), np.mean([r[6] > 0 for r in rows])
    print(f"fraction with a peakon: line {frac[0]:.3f}, circle {frac[1]:.3f}")


if __name__ == "__main__":
    main()
