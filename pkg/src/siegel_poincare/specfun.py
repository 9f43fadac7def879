"""Floating-point special functions: gamma, upper incomplete gamma, Whittaker W.

Gamma and the regularized incomplete gamma come from scipy (mpmath for the
parameter ranges scipy does not cover).  Whittaker W is evaluated from its
Laplace-type integral representation, with an upward recurrence in kappa
when the representation does not converge.
"""
from __future__ import annotations

import math
from numbers import Integral

import mpmath
import numpy as np
from scipy import integrate, special

from .config import Precision

DEFAULT_PRECISION = Precision()


def _is_nonpositive_integer(z) -> bool:
    z = complex(z)
    return z.imag == 0 and z.real <= 0 and z.real == math.floor(z.real)


def gamma(z):
    """Euler gamma for real or complex ``z``; raises at the poles."""
    if _is_nonpositive_integer(z):
        raise ValueError(f"gamma has a pole at {z}")
    if isinstance(z, complex) and z.imag != 0:
        return complex(special.gamma(z))
    return float(special.gamma(float(np.real(z))))


def _is_positive_int(s) -> bool:
    if isinstance(s, Integral):
        return s >= 1
    s = complex(s)
    return s.imag == 0 and s.real >= 1 and s.real == math.floor(s.real)


def incomplete_gamma_finite(s: int, x):
    """Gamma(s, x) = (s-1)! e^{-x} sum_{j<s} x^j/j!  for integer s >= 1.

    Accepts numpy arrays for ``x``.
    """
    s = int(s)
    term = np.ones_like(np.asarray(x, dtype=float))
    total = term.copy()
    for j in range(1, s):
        term = term * x / j
        total = total + term
    return math.factorial(s - 1) * np.exp(-np.asarray(x, dtype=float)) * total


def upper_incomplete_gamma(s, x, precision: Precision = DEFAULT_PRECISION):
    """Upper incomplete gamma Gamma(s, x) for x > 0."""
    if np.any(np.asarray(x) <= 0):
        raise ValueError("upper_incomplete_gamma requires x > 0")
    if _is_positive_int(s):
        out = incomplete_gamma_finite(int(np.real(s)), x)
        return float(out) if np.ndim(out) == 0 else out
    if np.ndim(x) != 0:
        return np.array([upper_incomplete_gamma(s, xi, precision) for xi in np.ravel(x)]).reshape(np.shape(x))
    s_c = complex(s)
    if s_c.imag == 0 and s_c.real > 0:
        return float(special.gammaincc(s_c.real, x) * special.gamma(s_c.real))
    with mpmath.workdps(30):
        val = mpmath.gammainc(mpmath.mpmathify(s), a=mpmath.mpf(x))
    if s_c.imag == 0:
        return float(mpmath.re(val))
    return complex(val)


def _whittaker_integral(kappa: float, mu: float, z: float, precision: Precision) -> float:
    # W = e^{-z/2} z^kappa / Gamma(a) * int_0^inf e^{-t} t^{a-1} (1 + t/z)^{mu+kappa-1/2} dt
    a = mu - kappa + 0.5
    p = mu + kappa - 0.5
    g = lambda t: np.exp(-t) * (1.0 + t / z) ** p
    eps = max(precision.rel_tol, 1e-14)
    head, _ = integrate.quad(g, 0.0, 1.0, weight="alg", wvar=(a - 1.0, 0.0),
                             epsabs=0.0, epsrel=eps, limit=200)
    tail, _ = integrate.quad(lambda t: g(t) * t ** (a - 1.0), 1.0, np.inf,
                             epsabs=0.0, epsrel=eps, limit=200)
    log_pref = -0.5 * z + kappa * math.log(z) - special.gammaln(a)
    return math.exp(log_pref) * (head + tail)


def whittaker_w(kappa: float, mu: float, z: float, precision: Precision = DEFAULT_PRECISION) -> float:
    """Whittaker function W_{kappa,mu}(z) for real parameters and z > 0."""
    if not z > 0:
        raise ValueError("whittaker_w requires z > 0")
    kappa, mu, z = float(kappa), abs(float(mu)), float(z)
    if mu - kappa + 0.5 > 0:
        return _whittaker_integral(kappa, mu, z, precision)
    # shift kappa down until both seeds sit in the convergent range
    j0 = math.floor(kappa - mu - 0.5) + 1
    k_lo = kappa - j0 - 1
    w_prev = _whittaker_integral(k_lo, mu, z, precision)
    w_cur = _whittaker_integral(k_lo + 1, mu, z, precision)
    k = k_lo + 1
    for _ in range(j0):
        w_next = (z - 2 * k) * w_cur - (k - mu - 0.5) * (k + mu - 0.5) * w_prev
        w_prev, w_cur = w_cur, w_next
        k += 1
    return w_cur
