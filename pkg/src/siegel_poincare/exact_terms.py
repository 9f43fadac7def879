"""Exact algebra of elliptic Fourier-series terms.

A term is

    c * y^a * e^{2 pi i n x} * e^{-2 pi m y} * Gamma(s, 4 pi g y)

with c a Gaussian rational times an integer power of pi.  The set of finite
sums of such terms is closed under d/dx, d/dy and multiplication by powers of
y, which is all the lowering/raising/xi operators need.  Since pi is
transcendental, a sum is zero iff every (shape, pi-power) coefficient is zero,
so zero-testing is exact once incomplete gammas with integer s >= 1 are
expanded into their finite closed form.
"""
from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

import numpy as np

from . import specfun


class NonClosureError(ValueError):
    """Raised when a product would need two unexpandable incomplete gammas."""


def _frac(v) -> Fraction:
    return v if type(v) is Fraction else Fraction(v)


_ZERO = Fraction(0)


def _mk(re: Fraction, im: Fraction, pp: int) -> "Coefficient":
    """Build a Coefficient from operands that are already Fractions."""
    c = object.__new__(Coefficient)
    object.__setattr__(c, "re", re)
    object.__setattr__(c, "im", im)
    object.__setattr__(c, "pi_power", pp if (re or im) else 0)
    return c


@dataclass(frozen=True)
class Coefficient:
    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)
    pi_power: int = 0

    def __post_init__(self):
        object.__setattr__(self, "re", _frac(self.re))
        object.__setattr__(self, "im", _frac(self.im))
        if self.re == 0 and self.im == 0:
            object.__setattr__(self, "pi_power", 0)

    @classmethod
    def of(cls, re=0, im=0, pi_power: int = 0) -> "Coefficient":
        return cls(_frac(re), _frac(im), pi_power)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __mul__(self, other: "Coefficient") -> "Coefficient":
        if not isinstance(other, Coefficient):
            other = Coefficient.of(other)
        pp = self.pi_power + other.pi_power
        # most coefficients are purely real or purely imaginary; skip the zero products
        if not self.im:
            if not other.im:
                return _mk(self.re * other.re, _ZERO, pp)
            return _mk(self.re * other.re, self.re * other.im, pp)
        if not self.re and not other.re:
            return _mk(-self.im * other.im, _ZERO, pp)
        return _mk(self.re * other.re - self.im * other.im,
                   self.re * other.im + self.im * other.re, pp)

    __rmul__ = __mul__

    def __add__(self, other: "Coefficient") -> "Coefficient":
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.pi_power != other.pi_power:
            raise ValueError("cannot add coefficients with different powers of pi")
        return _mk(self.re + other.re, self.im + other.im, self.pi_power)

    def __neg__(self) -> "Coefficient":
        return _mk(-self.re, -self.im, self.pi_power)

    def conjugate(self) -> "Coefficient":
        return _mk(self.re, -self.im, self.pi_power)

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im)) * math.pi ** self.pi_power

    def to_json(self) -> dict:
        return {"re": [self.re.numerator, self.re.denominator],
                "im": [self.im.numerator, self.im.denominator],
                "pi_pow": self.pi_power}

    @classmethod
    def from_json(cls, d: dict) -> "Coefficient":
        return cls(Fraction(*d["re"]), Fraction(*d["im"]), int(d["pi_pow"]))


ONE = Coefficient.of(1)
I_UNIT = Coefficient.of(0, 1)


@dataclass(frozen=True)
class ExactTerm:
    coeff: Coefficient
    y_exp: int = 0
    freq: int = 0
    decay: int = 0
    gamma: Optional[tuple[int, int]] = None  # (s, g) for Gamma(s, 4 pi g y)

    def __post_init__(self):
        if self.gamma is not None:
            s, g = self.gamma
            if g < 1:
                raise ValueError("incomplete gamma factor needs g >= 1")
            object.__setattr__(self, "gamma", (int(s), int(g)))

    @property
    def shape(self) -> tuple:
        return (self.y_exp, self.freq, self.decay, self.gamma)

    def sort_key(self) -> tuple:
        gk = (0, 0, 0) if self.gamma is None else (1, *self.gamma)
        return (self.y_exp, self.freq, self.decay, gk, self.coeff.pi_power)

    def scaled(self, c: Coefficient) -> "ExactTerm":
        return ExactTerm(self.coeff * c, self.y_exp, self.freq, self.decay, self.gamma)

    def conjugate(self) -> "ExactTerm":
        return ExactTerm(self.coeff.conjugate(), self.y_exp, -self.freq, self.decay, self.gamma)

    def expandable(self) -> bool:
        return self.gamma is not None and self.gamma[0] >= 1

    def expand_gamma(self) -> list["ExactTerm"]:
        """Replace Gamma(s, c y) by (s-1)! e^{-c y} sum_{j<s} (c y)^j / j!."""
        if not self.expandable():
            return [self]
        s, g = self.gamma
        out = []
        for j in range(s):
            c = Coefficient.of(Fraction(math.factorial(s - 1), math.factorial(j)) * (4 * g) ** j, 0, j)
            out.append(ExactTerm(self.coeff * c, self.y_exp + j, self.freq, self.decay + 2 * g, None))
        return out

    def d_dx(self) -> list["ExactTerm"]:
        return [self.scaled(Coefficient.of(0, 2 * self.freq, 1))]

    def d_dy(self) -> list["ExactTerm"]:
        out = []
        if self.y_exp:
            out.append(ExactTerm(self.coeff * Coefficient.of(self.y_exp), self.y_exp - 1,
                                 self.freq, self.decay, self.gamma))
        if self.decay:
            out.append(self.scaled(Coefficient.of(-2 * self.decay, 0, 1)))
        if self.gamma is not None:
            # d/dy Gamma(s, c y) = -c^s y^{s-1} e^{-c y},  c = 4 pi g
            s, g = self.gamma
            c = Coefficient.of(-Fraction(4 * g) ** s, 0, s)
            out.append(ExactTerm(self.coeff * c, self.y_exp + s - 1, self.freq, self.decay + 2 * g, None))
        return out

    def times_y(self, p: int) -> "ExactTerm":
        return ExactTerm(self.coeff, self.y_exp + p, self.freq, self.decay, self.gamma)

    def __mul__(self, other: "ExactTerm") -> "ExactTerm":
        if self.gamma is not None and other.gamma is not None:
            raise NonClosureError("product of two incomplete-gamma factors")
        return ExactTerm(self.coeff * other.coeff, self.y_exp + other.y_exp, self.freq + other.freq,
                         self.decay + other.decay, self.gamma or other.gamma)

    def evaluate(self, tau: complex) -> complex:
        x, y = tau.real, tau.imag
        if self.expandable():
            return sum(t.evaluate(tau) for t in self.expand_gamma())
        val = complex(self.coeff) * y ** self.y_exp * cmath.exp(2j * math.pi * self.freq * x - 2 * math.pi * self.decay * y)
        if self.gamma is not None:
            s, g = self.gamma
            val *= specfun.upper_incomplete_gamma(s, 4 * math.pi * g * y)
        return val

    def to_json(self) -> dict:
        return {"coeff": self.coeff.to_json(), "y_exp": self.y_exp, "freq": self.freq,
                "decay": self.decay, "gamma": None if self.gamma is None else list(self.gamma)}

    @classmethod
    def from_json(cls, d: dict) -> "ExactTerm":
        g = d.get("gamma")
        return cls(Coefficient.from_json(d["coeff"]), d["y_exp"], d["freq"], d["decay"],
                   None if g is None else tuple(g))


@dataclass(frozen=True)
class TermSum:
    """Normalized finite sum of ExactTerms."""

    terms: tuple[ExactTerm, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "terms", _normalize(self.terms))

    @classmethod
    def of(cls, *terms: ExactTerm) -> "TermSum":
        return cls(tuple(terms))

    def __iter__(self):
        return iter(self.terms)

    def __len__(self):
        return len(self.terms)

    def __add__(self, other: "TermSum") -> "TermSum":
        return TermSum(self.terms + other.terms)

    def __neg__(self) -> "TermSum":
        return self.scale(Coefficient.of(-1))

    def __sub__(self, other: "TermSum") -> "TermSum":
        return self + (-other)

    def scale(self, c: Coefficient) -> "TermSum":
        return TermSum(tuple(t.scaled(c) for t in self.terms))

    def map(self, fn) -> "TermSum":
        out: list[ExactTerm] = []
        for t in self.terms:
            out.extend(fn(t))
        return TermSum(tuple(out))

    def expand(self) -> "TermSum":
        """Expand every incomplete gamma with integer s >= 1."""
        return self.map(ExactTerm.expand_gamma)

    def is_zero(self) -> bool:
        return len(self.expand()) == 0

    def equals(self, other: "TermSum") -> bool:
        return (self - other).is_zero()

    def d_dx(self) -> "TermSum":
        return self.map(ExactTerm.d_dx)

    def d_dy(self) -> "TermSum":
        return self.map(ExactTerm.d_dy)

    def times_y(self, p: int) -> "TermSum":
        return TermSum(tuple(t.times_y(p) for t in self.terms))

    def conjugate(self) -> "TermSum":
        return TermSum(tuple(t.conjugate() for t in self.terms))

    def __mul__(self, other: "TermSum") -> "TermSum":
        a, b = self, other
        if any(t.gamma for t in a) and any(t.gamma for t in b):
            a, b = a.expand(), b.expand()
        return TermSum(tuple(s * t for s in a for t in b))

    def evaluate(self, tau: complex) -> complex:
        if tau.imag <= 0:
            raise ValueError("tau must lie in the upper half plane")
        return sum((t.evaluate(tau) for t in self.terms), 0j)

    def evaluate_many(self, tau: np.ndarray) -> np.ndarray:
        """Vectorized evaluation on an array of points in the upper half plane."""
        tau = np.asarray(tau, dtype=complex)
        x, y = tau.real, tau.imag
        out = np.zeros(tau.shape, dtype=complex)
        for t in self.expand().terms:
            # fold e^{-2 pi m y} and y^a into one exponential to avoid overflow
            arg = 2j * np.pi * t.freq * x - 2 * np.pi * t.decay * y + t.y_exp * np.log(y)
            val = complex(t.coeff) * np.exp(arg)
            if t.gamma is not None:
                s, g = t.gamma
                val = val * specfun.upper_incomplete_gamma(s, 4 * np.pi * g * y)
            out += val
        return out

    def to_json(self) -> list:
        return [t.to_json() for t in self.terms]

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, data: list) -> "TermSum":
        return cls(tuple(ExactTerm.from_json(d) for d in data))


def _normalize(terms: Iterable[ExactTerm]) -> tuple[ExactTerm, ...]:
    acc: dict[tuple, Coefficient] = {}
    for t in terms:
        key = (t.shape, t.coeff.pi_power)
        acc[key] = acc[key] + t.coeff if key in acc else t.coeff
    out = [ExactTerm(c, *shape) for (shape, _), c in acc.items() if not c.is_zero()]
    out.sort(key=ExactTerm.sort_key)
    return tuple(out)


@dataclass(frozen=True)
class WeightedFunction:
    """The pair (f, k): an expression together with its weight grading."""

    expr: TermSum = field(default_factory=TermSum)
    weight: int = 0

    def is_zero(self) -> bool:
        return self.expr.is_zero()

    def evaluate(self, tau: complex) -> complex:
        return self.expr.evaluate(tau)


def monomial(y_exp: int = 0, weight: int = 0, coeff: Coefficient = ONE) -> WeightedFunction:
    """(c y^a, k)."""
    return WeightedFunction(TermSum.of(ExactTerm(coeff, y_exp)), weight)


# ---------------------------------------------------------------- constructors

def make_phi(k: int, d: int, n: int) -> WeightedFunction:
    """y^{-d} e^{2 pi i n tau} at weight k."""
    if n <= 0:
        raise ValueError("phi needs n > 0")
    if d < 0:
        raise ValueError("phi needs d >= 0")
    return WeightedFunction(TermSum.of(ExactTerm(ONE, -d, n, n)), k)


def make_psi_tilde(k: int, n: int) -> WeightedFunction:
    """Gamma(1-k, 4 pi |n| y) e^{2 pi i n tau} at weight k  (k <= 0, n < 0)."""
    if k > 0 or n >= 0:
        raise ValueError("psi_tilde needs k <= 0 and n < 0")
    return WeightedFunction(TermSum.of(ExactTerm(ONE, 0, n, n, (1 - k, -n))), k)


def make_phi_tilde(k: int, n: int, *, check_range: bool = True) -> WeightedFunction:
    """y^{-k} e^{-2 pi i n conj(tau)} at weight k  (k < 0, n < 0).

    ``check_range=False`` admits n > 0, which is where lowering a psi_tilde
    lands (phi_tilde_{k-2}(-n)).
    """
    if check_range and (k >= 0 or n >= 0):
        raise ValueError("phi_tilde needs k < 0 and n < 0")
    if n == 0:
        raise ValueError("phi_tilde needs n != 0")
    # e^{-2 pi i n (x - i y)} = e^{2 pi i (-n) x} e^{-2 pi n y}
    return WeightedFunction(TermSum.of(ExactTerm(ONE, -k, -n, n)), k)


def make_psi(k: int, n: int) -> WeightedFunction:
    """y^{-k} Gamma(1+k, 4 pi n y) e^{2 pi i n conj(tau)} at weight k  (k >= 0, n > 0)."""
    if k < 0 or n <= 0:
        raise ValueError("psi needs k >= 0 and n > 0")
    return WeightedFunction(TermSum.of(ExactTerm(ONE, -k, n, -n, (1 + k, n))), k)


# ------------------------------------------------------------------ operators

def lower(f: WeightedFunction) -> WeightedFunction:
    """L_k = -2 i y^2 d/dtau-bar = -i y^2 d/dx + y^2 d/dy;  weight k -> k-2."""
    e = f.expr
    out = e.d_dx().scale(Coefficient.of(0, -1)).times_y(2) + e.d_dy().times_y(2)
    return WeightedFunction(out, f.weight - 2)


def raise_(f: WeightedFunction) -> WeightedFunction:
    """R_k = 2 i d/dtau + k/y = i d/dx + d/dy + k/y;  weight k -> k+2."""
    e = f.expr
    out = e.d_dx().scale(I_UNIT) + e.d_dy() + e.times_y(-1).scale(Coefficient.of(f.weight))
    return WeightedFunction(out, f.weight + 2)


def multiply(f: WeightedFunction, g: WeightedFunction) -> WeightedFunction:
    """(fg, k + l).  Incomplete gammas with integer s >= 1 are expanded."""
    a, b = f.expr.expand(), g.expr.expand()
    if any(t.gamma for t in a) and any(t.gamma for t in b):
        raise NonClosureError("both factors carry unexpandable incomplete gammas")
    return WeightedFunction(a * b, f.weight + g.weight)


def xi(f: WeightedFunction) -> WeightedFunction:
    """xi_k f = 2 i y^k conj(d f / d tau-bar) = y^{k-2} conj(L_k f);  weight 2-k."""
    lowered = lower(f).expr.conjugate().times_y(f.weight - 2)
    return WeightedFunction(lowered, 2 - f.weight)


def almost_holomorphic_depth(f: WeightedFunction, d_max: int) -> Optional[int]:
    """Smallest d <= d_max with L^{d+1} f = 0, or None."""
    if d_max < 0:
        raise ValueError("d_max must be nonnegative")
    g = WeightedFunction(f.expr.expand(), f.weight)
    for d in range(d_max + 1):
        g = lower(g)
        if g.is_zero():
            return d
    return None


def evaluate(f: WeightedFunction, tau: complex) -> complex:
    return f.expr.evaluate(complex(tau))


def max_inverse_y_power(f: WeightedFunction) -> int:
    """Largest D with a y^{-D} term after gamma expansion (0 if none).

    This is the growth exponent controlling convergence of the Poincare
    series of f as Im(gamma tau) -> 0.
    """
    worst = 0
    for t in f.expr.expand():
        # Gamma(s, c y) ~ (c y)^s as y -> 0 when s < 0
        a = t.y_exp + (min(t.gamma[0], 0) if t.gamma else 0)
        worst = max(worst, -a)
    return worst
