"""Shell sums of the degree-2 series against the tail model, heights 1 to 3.

Height 3 has 179424 cosets and takes about a minute and a half.
"""
import argparse
import math

import numpy as np

from siegel_poincare import poincare2 as p2
from siegel_poincare.siegel_kernel import SiegelPoint, shimura_fit


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--height", type=int, default=3)
    ap.add_argument("--l", type=int, default=20)
    ap.add_argument("--y0", type=float, default=1.1)
    args = ap.parse_args()
    fit = shimura_fit(4)
    p = p2.P2Params(4, args.l, height=args.height)
    terms, _, g = p2.summands(p, SiegelPoint.scalar(args.y0))
    maj = p2.majorant_terms(p, g, fit)
    print(f"b_fit = {fit.b:.4f}, model shell exponent = {p.weight - 2 * fit.b - p2.SHELL_COUNT_EXPONENT:.3f}")
    print(f"largest summand / majorant = {np.max(np.abs(terms) / maj):.3f}")
    print(f"{'h':>2} {'cosets':>7} {'|shell sum|':>12} {'sum |terms|':>12} {'majorant':>12}")
    for h in range(1, args.height + 1):
        s = g.heights == h
        print(f"{h:>2} {s.sum():>7} {abs(terms[s].sum()):12.4e} {np.abs(terms[s]).sum():12.4e} {maj[s].sum():12.4e}")
    for H in range(1, args.height):
        sub = g.heights <= H
        r = p2.eval_p2(p2.P2Params(4, args.l, height=H), SiegelPoint.scalar(args.y0),
                       reps=[rep for rep, keep in zip(g.reps, sub) if keep], fit=fit)
        rest = abs(terms[~sub].sum())
        print(f"H={H}: reported tail {r.tail:.3e}, actual remainder through height {args.height}: {rest:.3e}")


if __name__ == "__main__":
    main()
