"""Lowering-depth probe on the truncated series and on the bare product Psi_k Phi_l.

The structured lowering tower is first compared with nested finite differences
at d = 1, 2 on the bare product, then the full probe is run (several minutes
for the series at d_max = 4).

Usage: python scripts/depth_probe.py [--d-max 4] [--skip-series]
"""
import argparse
import time

import numpy as np

from siegel_poincare import siegel_kernel as sk
from siegel_poincare.poincare2 import P2Params, lowering_depth_probe
from siegel_poincare.siegel_kernel import SiegelPoint, SymMat2
from siegel_poincare.verification import PROBE_POINTS


def fd_check(k=4, T=np.eye(2)):
    Z = SiegelPoint.from_complex(PROBE_POINTS[1])
    F = lambda W: sk.psi(k, T, W)
    L1 = sk.apply_lowering(F, Z)
    L2 = sk.apply_lowering(lambda W: sk.apply_lowering(F, W, h_step=1e-3, check=False), Z, h_step=1e-3, check=False)
    tower = [sk.lowered_psi(k, T, [Z.Z], d)[0] for d in (1, 2)]
    for d, fd, st in ((1, L1, tower[0]), (2, L2, tower[1])):
        rel = np.linalg.norm(fd - st) / np.linalg.norm(st)
        print(f"d={d}: structured vs finite differences, relative difference {rel:.2e}")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--d-max", type=int, default=4)
    ap.add_argument("--skip-series", action="store_true")
    args = ap.parse_args()
    fd_check()
    p = P2Params(4, 16, SymMat2.identity(), SymMat2.identity(), 2)
    Zs = [SiegelPoint.from_complex(z) for z in PROBE_POINTS]
    targets = ["product"] + ([] if args.skip_series else ["series"])
    for target in targets:
        t = time.time()
        r = lowering_depth_probe(p, Zs, args.d_max, target)
        print(f"\n{target} ({time.time() - t:.0f} s)")
        print(f"{'d':>2} {'ratio':>11} {'floor':>11} {'tail':>11} {'diff err':>11}")
        for d in range(args.d_max):
            print(f"{d + 1:>2} {r.ratios[d]:11.4e} {r.noise_floor[d]:11.4e} {r.tail[d]:11.4e} {r.differencing_error[d]:11.4e}")
        print(f"annihilation depth: {r.annihilation_depth}")


if __name__ == "__main__":
    main()
