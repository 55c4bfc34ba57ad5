#!/usr/bin/env python3
"""Closed-form convolutions against adaptive quadrature for several (A, k1, k2).

Writes one CSV per identity and parameter set plus summary.csv, and prints
the worst absolute difference for each.
"""
import argparse
import itertools
import time
from pathlib import Path

import numpy as np

from peakonlab.cli import IDENTITIES, convolution_table
from peakonlab.io import write_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=101)
    ap.add_argument("--out", default="out/convolution_suite")
    args = ap.parse_args()
    out = Path(args.out)
    summary = []
    for identity, (A, k1, k2) in itertools.product(IDENTITIES, [(1.0, 1.0, 1.0), (2.0, -0.5, 1.5), (0.3, 3.0, -2.0)]):
        t0 = time.perf_counter()
        s, cf, qd = convolution_table(identity, args.samples, A, k1, k2)
        diff = np.abs(cf - qd)
        tag = f"{identity}_A{A:g}_k1{k1:g}_k2{k2:g}"
        write_csv(out / f"{tag}.csv", ("s", "closed_form", "quadrature", "abs_diff"), zip(s, cf, qd, diff))
        j = int(np.argmax(diff))
        summary.append((identity, A, k1, k2, diff[j], s[j], time.perf_counter() - t0))
        print(f"{identity:17s} A={A:<4g} k1={k1:<5g} k2={k2:<5g} max|diff|={diff[j]:.2e} at s={s[j]:+.4f}")
    write_csv(out / "summary.csv", ("identity", "A", "k1", "k2", "max_abs_diff", "worst_s", "seconds"), summary)
    worst = max(r[4] for r in summary)
    print(f"worst over all cases: {worst:.2e} ({'within' if worst <= 1e-8 else 'OUTSIDE'} 1e-8)")


if __name__ == "__main__":
    main()
