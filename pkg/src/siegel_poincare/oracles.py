"""Independent reference computations used to check the main implementations.

Each oracle reaches its answer by a different route from the code it checks:
sampling instead of quadrature, characters instead of the Clebsch-Gordan
formula, brute-force sets instead of ray bookkeeping, Smith normal forms
instead of minor gcds.
"""
from __future__ import annotations

import itertools
import math

import numpy as np
from scipy.special import gamma as _gamma
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_decomp

from .gk_support import KType, Sl2Support


# ------------------------------------------------------------- h by sampling

def monte_carlo_h(alpha: float, beta: float, T, Y, n_samples: int = 10 ** 7,
                  seed: int = 0, chunk: int = 10 ** 6) -> tuple[float, float]:
    """h_{alpha,beta}(T; Y) and its standard error by Wishart sampling.

    With V = U - T the integral is e^{-2 pi tr(YT)} times
    int_{V > 0} det(V)^{beta-3/2} det(V + 2T)^{alpha-3/2} e^{-tr(Sigma^{-1} V)/2} dV,
    Sigma = (4 pi Y)^{-1}.  The first and last factors form an unnormalized
    Wishart(2 beta, Sigma) density with mass 2^{2 beta} det(Sigma)^beta Gamma_2(beta),
    so h is that mass times E[det(V + 2T)^{alpha-3/2}].  V is drawn with the
    Bartlett decomposition.
    """
    T, Y = np.asarray(T, float), np.asarray(Y, float)
    n = 2.0 * beta
    if n <= 1:
        raise ValueError("Wishart sampling needs 2 beta > 1")
    Sigma = np.linalg.inv(4 * np.pi * Y)
    L = np.linalg.cholesky(Sigma)
    gamma2 = math.sqrt(math.pi) * _gamma(n / 2) * _gamma(n / 2 - 0.5)
    mass = 2 ** n * np.linalg.det(Sigma) ** (n / 2) * gamma2
    rng = np.random.default_rng(seed)
    total, total_sq, count = 0.0, 0.0, 0
    while count < n_samples:
        m = min(chunk, n_samples - count)
        a11 = np.sqrt(rng.chisquare(n, m))
        a22 = np.sqrt(rng.chisquare(n - 1, m))
        a21 = rng.standard_normal(m)
        m11 = L[0, 0] * a11
        m21 = L[1, 0] * a11 + L[1, 1] * a21
        m22 = L[1, 1] * a22
        v11, v12, v22 = m11 * m11, m11 * m21, m21 * m21 + m22 * m22
        det = (v11 + 2 * T[0, 0]) * (v22 + 2 * T[1, 1]) - (v12 + 2 * T[0, 1]) ** 2
        x = det ** (alpha - 1.5)
        total += math.fsum(x)
        total_sq += math.fsum(x * x)
        count += m
    mean = total / count
    var = max(total_sq / count - mean * mean, 0.0)
    pref = mass * math.exp(-2 * math.pi * float(np.trace(Y @ T)))
    return pref * mean, pref * math.sqrt(var / count)


# --------------------------------------------------------- U(2) characters

def u2_character(t: KType, z1: complex, z2: complex) -> complex:
    """Schur polynomial s_{(a,b)}(z1, z2) = (z1^{a+1} z2^b - z2^{a+1} z1^b) / (z1 - z2)."""
    return (z1 ** (t.a + 1) * z2 ** t.b - z2 ** (t.a + 1) * z1 ** t.b) / (z1 - z2)


def character_decomposition(t1: KType, t2: KType) -> dict[KType, int]:
    """Multiplicities in t1 (x) t2 from the product character.

    The product character is a Laurent polynomial in (z1, z2) whose dominant
    monomials are peeled off one at a time; this never uses the
    Clebsch-Gordan formula.
    """
    prod: dict[tuple[int, int], int] = {}

    def monomials(t: KType) -> dict[tuple[int, int], int]:
        return {(t.a - j, t.b + j): 1 for j in range(t.a - t.b + 1)}

    for (p1, q1), c1 in monomials(t1).items():
        for (p2, q2), c2 in monomials(t2).items():
            key = (p1 + p2, q1 + q2)
            prod[key] = prod.get(key, 0) + c1 * c2
    out: dict[KType, int] = {}
    while any(prod.values()):
        a, b = max(k for k, v in prod.items() if v and k[0] >= k[1])
        mult = prod[(a, b)]
        out[KType(a, b)] = mult
        for key in monomials(KType(a, b)):
            prod[key] = prod.get(key, 0) - mult
        if any(v < 0 for v in prod.values()):
            raise ArithmeticError("character is not a nonnegative combination")
    return out


# ------------------------------------------------------------ SL2 supports

def brute_tensor_min(s1: Sl2Support, s2: Sl2Support, reach: int = 200):
    """Minimum of the Minkowski sum of two supports, on a wide explicit slab."""
    a = s1.materialize(s1.w_min - reach, s1.w_max + reach)
    b = s2.materialize(s2.w_min - reach, s2.w_max + reach)
    sums = {x + y for x in a for y in b}
    if not sums:
        return None
    if s1.extends_below and a or s2.extends_below and b:
        return None
    return min(sums)


# ------------------------------------------------------------ coset counts

def snf_is_coprime_symmetric(C, D) -> bool:
    """C D^T symmetric and the Smith form of (C D) equal to (I 0)."""
    C, D = np.asarray(C, dtype=np.int64), np.asarray(D, dtype=np.int64)
    CDt = C @ D.T
    if CDt[0, 1] != CDt[1, 0]:
        return False
    N = np.hstack([C, D])
    if not N.any():
        return False
    S, _, _ = smith_normal_decomp(Matrix(N.tolist()), domain=ZZ)
    return abs(S[0, 0]) == 1 and abs(S[1, 1]) == 1


def brute_force_pair_count(height: int) -> int:
    """Number of coprime symmetric pairs with entries in [-height, height].

    Pairs are screened by the symmetry test.  A pair with some 2x2 minor
    equal to +-1 is primitive outright (the minor divides the product of
    the elementary divisors); every other survivor is put through a full
    Smith normal form.
    """
    r = np.arange(-height, height + 1)
    mats = np.array(list(itertools.product(r, repeat=4))).reshape(-1, 2, 2)
    count = 0
    for C in mats:
        CDt = np.einsum("ij,nkj->nik", C, mats)
        Ds = mats[CDt[:, 0, 1] == CDt[:, 1, 0]]
        N = np.concatenate([np.broadcast_to(C, Ds.shape), Ds], axis=2)
        unit = np.zeros(len(Ds), dtype=bool)
        for i, j in itertools.combinations(range(4), 2):
            unit |= np.abs(N[:, 0, i] * N[:, 1, j] - N[:, 0, j] * N[:, 1, i]) == 1
        count += int(unit.sum())
        count += sum(snf_is_coprime_symmetric(C, D) for D in Ds[~unit])
    return count
