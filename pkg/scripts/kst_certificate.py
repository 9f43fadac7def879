"""Smallest |det(C i y I + D)| over C != 0 bottom rows, by height and grid value.

Usage: python scripts/kst_certificate.py [--max-height 3]
"""
import argparse

from siegel_poincare.poincare2 import kst_y0_search

GRID = [1.01, 1.05, 1.1, 1.5, 2.0, 3.0]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--max-height", type=int, default=3)
    args = ap.parse_args()
    for H in range(1, args.max_height + 1):
        r = kst_y0_search(H, GRID)
        mins = "  ".join(f"{y}:{m:.4f}" for y, m in zip(r.grid, r.min_abs_det))
        print(f"height {H}: y0 = {r.y0}, margin = {r.margin:.4f}   min|det| by y: {mins}")


if __name__ == "__main__":
    main()
