#!/usr/bin/env python3
"""Sweep the 1-D Remez equality case: measured ratio against the sharp bound.

For each degree k and gap eps, the transplanted Chebyshev polynomial on
V = [-1, 1] with omega = [-1, 1 - eps] attains the sharp constant.  Writes
one plot-data file per eps with columns (k, measured/bound).

Usage: python scripts/remez_sharpness_scan.py [--depth 12] [--out out_sharpness]
"""

import argparse
import os
import sys

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from fractal_remez import fractals, remez
from fractal_remez.geometry import Ball
from fractal_remez.polynomials import chebyshev
from fractal_remez.reporting import ensure_dir, write_plot_data


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--depth", type=int, default=12)
    ap.add_argument("--kmax", type=int, default=8)
    ap.add_argument("--out", default="out_sharpness")
    args = ap.parse_args()

    out = ensure_dir(args.out)
    base = fractals.build_preset("cube:1", args.depth)
    V = Ball((0.0,), 1.0)
    for eps in (0.05, 0.1, 0.25, 0.5):
        ks, rel = [], []
        omega_set = fractals.transform(base, 2.0 - eps, [-1.0])
        for k in range(1, args.kmax + 1):
            p = chebyshev(k).compose_affine(2.0 / (2.0 - eps),
                                            eps / (2.0 - eps))
            rep = remez.empirical_remez(p, V, omega_set, np.inf, np.inf)
            bound = remez.bg_bound(1, k, (2.0 - eps) / 2.0)
            ks.append(k)
            rel.append(rep.empirical_ratio / bound)
            print(f"eps={eps:4.2f} k={k}: measured/bound = "
                  f"{rep.empirical_ratio / bound:.8f}")
        write_plot_data(os.path.join(out, f"sharpness_eps{eps:g}.dat"),
                        "degree k", "measured ratio / sharp bound", ks, rel)
    print(f"plot data in {out}/")


if __name__ == "__main__":
    main()
