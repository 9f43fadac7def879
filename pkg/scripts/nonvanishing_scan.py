"""C = 0 / C != 0 split of the degree-2 series at i y0 I over a range of l, for several y0.

Usage: python scripts/nonvanishing_scan.py [--height 2] [--y0 1.1,1.5,2,3]
"""
import argparse

from siegel_poincare.poincare2 import kst_y0_search, nonvanishing_scan
from siegel_poincare.siegel_kernel import SymMat2, shimura_fit


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--k", type=int, default=4)
    ap.add_argument("--height", type=int, default=2)
    ap.add_argument("--y0", default="1.1,1.5,2,3")
    args = ap.parse_args()
    I = SymMat2.identity()
    fit = shimura_fit(args.k)
    kst = kst_y0_search(args.height, [1.1, 1.5, 2.0, 3.0])
    print(f"KST y0 at height {args.height}: {kst.y0} (margin {kst.margin:.3g})")
    for y0 in map(float, args.y0.split(",")):
        scan = nonvanishing_scan(args.k, I, I, y0, range(8, 25, 2), args.height, fit=fit)
        print(f"\ny0 = {y0}")
        print(f"{'l':>3} {'C=0':>12} {'|C!=0|':>12} {'Re C!=0':>12} {'total':>12}")
        for r in scan.rows:
            print(f"{r.l:>3} {r.c_zero.real:12.4e} {abs(r.c_nonzero):12.4e} {r.c_nonzero.real:12.4e} {r.total.real:12.4e}")
        mags = [abs(r.c_nonzero) for r in scan.rows]
        mono = all(b < a for a, b in zip(mags, mags[1:]))
        print(f"|C!=0| strictly decreasing: {mono}; crossover l: {scan.crossover}")


if __name__ == "__main__":
    main()
