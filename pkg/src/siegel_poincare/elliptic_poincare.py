"""Truncated elliptic Poincare series and the spectral-pairing identity.

The series runs over Gamma_infty \\ SL2(Z), represented by coprime bottom
rows (c, d).  Truncation is by height max(|c|, |d|) <= H.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import integrate

from . import specfun
from .config import Precision
from .exact_terms import WeightedFunction, max_inverse_y_power


class ConvergenceError(ValueError):
    """The series fails its absolute-convergence condition."""


@dataclass(frozen=True, order=True)
class Sl2CosetRep:
    c: int
    d: int
    a: int
    b: int

    def __post_init__(self):
        if self.a * self.d - self.b * self.c != 1:
            raise ValueError("coset representative must have determinant 1")

    def act(self, tau):
        return (self.a * tau + self.b) / (self.c * tau + self.d)

    def height(self) -> int:
        return max(abs(self.c), abs(self.d))


def _complete(c: int, d: int) -> Sl2CosetRep:
    if c == 0:
        return Sl2CosetRep(0, 1, 1, 0)
    a = pow(d, -1, c) if c > 1 else 0
    b = (a * d - 1) // c
    return Sl2CosetRep(c, d, a, b)


@lru_cache(maxsize=64)
def _cosets(height: int) -> tuple[Sl2CosetRep, ...]:
    reps = [_complete(0, 1)]
    for c in range(1, height + 1):
        for d in range(-height, height + 1):
            if math.gcd(c, d) == 1:
                reps.append(_complete(c, d))
    return tuple(sorted(reps, key=lambda r: (r.c, r.d)))


def enumerate_sl2_cosets(height: int) -> list[Sl2CosetRep]:
    """Normalized coprime rows (c, d) with max(|c|, |d|) <= height, sorted by (c, d)."""
    if height < 1:
        raise ValueError("height must be >= 1")
    return list(_cosets(int(height)))


def convergence_margin(f: WeightedFunction) -> int:
    """k_total - 2 D - 2, where y^{-D} is the worst growth of f as y -> 0.

    The Poincare series of f converges absolutely iff this is positive.
    """
    return f.weight - 2 * max_inverse_y_power(f) - 2


@dataclass(frozen=True)
class EllipticResult:
    value: complex
    tail: float
    height: int
    n_cosets: int
    converges: bool
    shell_magnitude: float

    def to_dict(self) -> dict:
        return {"value": [self.value.real, self.value.imag], "tail": self.tail,
                "height": self.height, "n_cosets": self.n_cosets,
                "converges": self.converges, "tail_model": "heuristic"}


def _fsum_complex(vals: np.ndarray) -> complex:
    return complex(math.fsum(vals.real), math.fsum(vals.imag))


def slashed_terms(f: WeightedFunction, tau: complex, reps) -> np.ndarray:
    """(f|_k gamma)(tau) for every representative, in the given order."""
    c = np.array([r.c for r in reps], dtype=float)
    d = np.array([r.d for r in reps], dtype=float)
    a = np.array([r.a for r in reps], dtype=float)
    b = np.array([r.b for r in reps], dtype=float)
    j = c * tau + d
    gtau = (a * tau + b) / j
    return j ** (-f.weight) * f.expr.evaluate_many(gtau)


def eval_elliptic_poincare(f: WeightedFunction, tau: complex, height: int,
                           allow_divergent: bool = False,
                           reps=None) -> EllipticResult:
    """Partial sum of sum_gamma (f|_k gamma)(tau) over cosets of height <= H.

    The tail is estimated from the outermost shell assuming shells decay like
    h^{1-K} with K = k_total - 2D; it is reported, never added.
    """
    tau = complex(tau)
    if tau.imag <= 0:
        raise ValueError("tau must lie in the upper half plane")
    margin = convergence_margin(f)
    if margin <= 0 and not allow_divergent:
        raise ConvergenceError(f"series does not converge (margin {margin})")
    if reps is None:
        reps = enumerate_sl2_cosets(height)
    vals = slashed_terms(f, tau, reps)
    if not np.all(np.isfinite(vals)):
        raise FloatingPointError("non-finite summand")
    value = _fsum_complex(vals)
    heights = np.array([r.height() for r in reps])
    h_max = int(heights.max())
    shell = math.fsum(np.abs(vals[heights == h_max]))
    k_eff = margin + 2
    tail = shell * h_max / (k_eff - 2) if margin > 0 else math.inf
    return EllipticResult(value, tail, h_max, len(reps), margin > 0, shell)


def poincare_function(f: WeightedFunction, height: int, allow_divergent: bool = False) -> Callable:
    """tau -> truncated series value, vectorized over arrays of tau."""
    reps = enumerate_sl2_cosets(height)
    if convergence_margin(f) <= 0 and not allow_divergent:
        raise ConvergenceError("series does not converge")

    def P(tau):
        tau = np.asarray(tau, dtype=complex)
        flat = tau.ravel()
        out = np.array([_fsum_complex(slashed_terms(f, t, reps)) for t in flat])
        return out.reshape(tau.shape) if tau.ndim else complex(out[0])

    return P


# ------------------------------------------------------ numeric differentiation

def _step(tau: complex, h: float | None) -> float:
    return 1e-5 * min(1.0, tau.imag) if h is None else h


def numeric_lower(F: Callable, tau: complex, h: float | None = None) -> complex:
    """L = -i y^2 d/dx + y^2 d/dy by central differences."""
    tau = complex(tau)
    h = _step(tau, h)
    fx = (F(tau + h) - F(tau - h)) / (2 * h)
    fy = (F(tau + 1j * h) - F(tau - 1j * h)) / (2 * h)
    y2 = tau.imag ** 2
    return -1j * y2 * fx + y2 * fy


def numeric_raise(F: Callable, k: int, tau: complex, h: float | None = None) -> complex:
    """R_k = i d/dx + d/dy + k/y by central differences."""
    tau = complex(tau)
    h = _step(tau, h)
    fx = (F(tau + h) - F(tau - h)) / (2 * h)
    fy = (F(tau + 1j * h) - F(tau - 1j * h)) / (2 * h)
    return 1j * fx + fy + k / tau.imag * F(tau)


def _cheb(n: int) -> tuple[np.ndarray, np.ndarray]:
    # Chebyshev-Lobatto nodes on [-1, 1] and the differentiation matrix
    x = np.cos(np.pi * np.arange(n + 1) / n)
    c = np.ones(n + 1)
    c[0] = c[-1] = 2
    c *= (-1) ** np.arange(n + 1)
    X = np.tile(x, (n + 1, 1)).T
    dX = X - X.T
    D = np.outer(c, 1 / c) / (dX + np.eye(n + 1))
    D -= np.diag(D.sum(axis=1))
    return x, D


def spectral_lower_power(F: Callable, tau: complex, d: int, radius: float | None = None,
                         order: int = 24) -> complex:
    """(L^d F)(tau) by Chebyshev collocation on a square around tau.

    Iterated finite differences lose too many digits beyond d = 1; a
    polynomial interpolant of an analytic function differentiates stably.
    """
    tau = complex(tau)
    r = 0.25 * tau.imag if radius is None else radius
    if order % 2:
        order += 1
    nodes, D = _cheb(order)
    xs = tau.real + r * nodes
    ys = tau.imag + r * nodes
    grid = xs[None, :] + 1j * ys[:, None]  # rows: y, cols: x
    G = np.asarray(F(grid), dtype=complex)
    Dx, Dy = D / r, D / r
    y2 = (ys ** 2)[:, None]
    for _ in range(d):
        G = y2 * (-1j * (G @ Dx.T) + Dy @ G)
    mid = order // 2
    return complex(G[mid, mid])


# ----------------------------------------------------------- spectral pairing

@dataclass(frozen=True)
class PairingResult:
    lhs: float
    rhs: float
    rel_err: float

    def to_dict(self) -> dict:
        return {"lhs": self.lhs, "rhs": self.rhs, "rel_err": self.rel_err}


def spectral_pairing_rhs(k: int, l: int, s: float, n: int, m: int) -> float:
    c = 4 * math.pi * (m - n)
    return c ** (1 - l) * specfun.gamma((l - k) / 2 + s - 1) * specfun.gamma((l - k) / 2 - s) / specfun.gamma(-k)


def spectral_pairing_lhs(k: int, l: int, s: float, n: int, m: int,
                         precision: Precision = specfun.DEFAULT_PRECISION) -> float:
    c = 4 * math.pi * (m - n)
    kappa, mu = (k + l) / 2, s - 0.5

    def integrand(y):
        z = c * y
        return (y ** (-k) * math.exp(-2 * math.pi * (m - n) * y) * z ** (-kappa)
                * specfun.whittaker_w(kappa, mu, z, precision) * y ** (k + l - 2))

    # the integrand peaks near y ~ 1/c; split there for the adaptive rule
    y0 = 1.0 / c
    eps = max(precision.rel_tol, 1e-13)
    parts = [(0.0, y0), (y0, 10 * y0), (10 * y0, np.inf)]
    return math.fsum(integrate.quad(integrand, lo, hi, epsabs=0, epsrel=eps, limit=200)[0]
                     for lo, hi in parts)


def spectral_pairing_check(k: int, l: int, s: float, n: int, m: int,
                           precision: Precision = specfun.DEFAULT_PRECISION) -> PairingResult:
    """Quadrature of the pairing integral against its gamma-product closed form."""
    if k > 0 or k % 2:
        raise ValueError("k must be a nonpositive even integer")
    if k == 0:
        raise ValueError("k < 0 is needed for Gamma(-k) to be finite")
    if not s > 0.5:
        raise ValueError("s must exceed 1/2")
    if m <= n:
        raise ValueError("need m > n")
    if k + l <= 2:
        raise ValueError("need k + l > 2")
    if not (l - k) / 2 > s:
        raise ValueError("need (l - k)/2 > s")
    lhs = spectral_pairing_lhs(k, l, s, n, m, precision)
    rhs = spectral_pairing_rhs(k, l, s, n, m)
    return PairingResult(lhs, rhs, abs(lhs - rhs) / abs(rhs))
