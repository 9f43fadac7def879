"""Almost-holomorphic Poincare series built from products of Fourier-series terms.

Submodules:
    exact_terms        exact algebra of elliptic Fourier terms and the L, R, xi operators
    specfun            gamma, incomplete gamma and Whittaker W
    elliptic_poincare  truncated elliptic Poincare series and the spectral-pairing identity
    gk_support         weight supports of C[L, R]-modules and K-type supports with walls
    siegel_kernel      degree-2 slash actions, the h integral, Psi/Phi, lowering and Omega
    sp2_cosets         Delta \\ Sp2(Z) coset representatives
    poincare2          the degree-2 series, the KST search, nonvanishing scan, depth probe
    cli                command-line entry point
"""
__version__ = "0.1.0"
