"""The C = 0 stratum computed from the slash action versus the printed closed form."""
from siegel_poincare import poincare2 as p2
from siegel_poincare.siegel_kernel import SiegelPoint, SymMat2, shimura_fit


def main():
    fit = shimura_fit(4)
    for T in (SymMat2.identity(), SymMat2(1, 0.5, 1)):
        for y0 in (1.1, 2.0):
            p = p2.P2Params(4, 20, T=T, height=2)
            first = p2.eval_p2(p, SiegelPoint.scalar(y0), fit=fit).c_zero.real
            shown = p2.c_zero_display(p, y0)
            print(f"T={T.to_list()} y0={y0}: slash {first:.4e}, closed form {shown:.4e}, ratio {first / shown:.4e}")


if __name__ == "__main__":
    main()
