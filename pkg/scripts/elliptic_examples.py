"""Elliptic series: a vanishing example and an almost-holomorphic nonvanishing one.

Weights 10 and 14 carry no cusp forms, so series of those weights built from
holomorphic or almost-holomorphic seeds tend to zero; their partial sums are
compared with the sum of summand moduli.  The weight-16 product psi_2 phi_14
gives a nonzero series whose third lowering vanishes.
"""
import numpy as np

from siegel_poincare import exact_terms as et
from siegel_poincare.elliptic_poincare import (enumerate_sl2_cosets, eval_elliptic_poincare,
                                               poincare_function, slashed_terms, spectral_lower_power)


def vanishing(f, tau, heights):
    print(f"weight {f.weight} at tau = {tau}")
    for H in heights:
        r = eval_elliptic_poincare(f, tau, H)
        scale = float(np.abs(slashed_terms(f, tau, enumerate_sl2_cosets(H))).sum())
        print(f"  H={H:>3}: |partial sum| = {abs(r.value):.3e}, sum |summands| = {scale:.3e}, tail = {r.tail:.3e}")


def main():
    vanishing(et.multiply(et.make_phi(10, 0, 1), et.make_phi(4, 0, 1)), 2j, (10, 20, 40, 80))
    vanishing(et.multiply(et.make_psi(2, 1), et.make_phi(8, 0, 1)), 1j, (10, 20, 40))
    f = et.multiply(et.make_psi(2, 1), et.make_phi(14, 0, 1))
    tau = 0.1 + 1.1j
    P = poincare_function(f, 20)
    v = abs(P(tau))
    print(f"\npsi_2 phi_14 at tau = {tau}, H = 20: |P| = {v:.4e}")
    for d in range(5):
        print(f"  |L^{d} P| / |P| = {abs(spectral_lower_power(P, tau, d)) / v:.3e}")


if __name__ == "__main__":
    main()
