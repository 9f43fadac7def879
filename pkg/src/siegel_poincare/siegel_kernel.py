"""Degree-2 building blocks: Siegel points, slash actions, the matrix integral h,
the Fourier terms Psi_k and Phi_l, and the operators L and Omega.

Derivative convention: for a symmetric matrix variable Z = X + iY,
(d/dZ)_{ij} = 1/2 (1 + delta_ij) d/dz_ij with d/dz = (d/dx - i d/dy)/2, and
d/dZbar likewise with +i.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.special import roots_genlaguerre, roots_jacobi

from .config import QuadratureSpec


class QuadratureError(RuntimeError):
    """Requested tolerance not reached within the refinement budget."""


# ------------------------------------------------------------------ matrices

@dataclass(frozen=True)
class SymMat2:
    m11: float
    m12: float
    m22: float

    @classmethod
    def from_array(cls, a) -> "SymMat2":
        a = np.asarray(a)
        if not np.allclose(a, a.T):
            raise ValueError("matrix is not symmetric")
        return cls(a[0, 0].item(), a[0, 1].item(), a[1, 1].item())

    @classmethod
    def identity(cls) -> "SymMat2":
        return cls(1, 0, 1)

    def as_array(self) -> np.ndarray:
        return np.array([[self.m11, self.m12], [self.m12, self.m22]], dtype=float)

    @property
    def det(self):
        return self.m11 * self.m22 - self.m12 * self.m12

    @property
    def trace(self):
        return self.m11 + self.m22

    def positive_definite(self) -> bool:
        return self.m11 > 0 and self.det > 0

    def half_integral(self) -> bool:
        def is_int(v):
            return Fraction(v).denominator == 1
        return is_int(self.m11) and is_int(self.m22) and is_int(2 * Fraction(self.m12))

    def congruent(self, U) -> "SymMat2":
        """U^T S U."""
        U = np.asarray(U)
        return SymMat2.from_array(U.T @ self.as_array() @ U)

    def to_list(self) -> list:
        return [[float(self.m11), float(self.m12)], [float(self.m12), float(self.m22)]]


@dataclass(frozen=True)
class SiegelPoint:
    X: SymMat2
    Y: SymMat2

    def __post_init__(self):
        if not self.Y.positive_definite():
            raise ValueError("Y must be positive definite")

    @classmethod
    def from_complex(cls, Z) -> "SiegelPoint":
        Z = np.asarray(Z, dtype=complex)
        return cls(SymMat2.from_array(Z.real), SymMat2.from_array(Z.imag))

    @classmethod
    def scalar(cls, y0: float) -> "SiegelPoint":
        return cls(SymMat2(0, 0, 0), SymMat2(y0, 0, y0))

    @property
    def Z(self) -> np.ndarray:
        return self.X.as_array() + 1j * self.Y.as_array()

    def coords(self) -> np.ndarray:
        """(x11, x12, x22, y11, y12, y22)."""
        return np.array([self.X.m11, self.X.m12, self.X.m22, self.Y.m11, self.Y.m12, self.Y.m22], float)

    @classmethod
    def from_coords(cls, v) -> "SiegelPoint":
        return cls(SymMat2(v[0], v[1], v[2]), SymMat2(v[3], v[4], v[5]))


def _blocks(M):
    if hasattr(M, "A"):
        return (np.asarray(M.A, float), np.asarray(M.B, float),
                np.asarray(M.C, float), np.asarray(M.D, float))
    M = np.asarray(M, float)
    return M[:2, :2], M[:2, 2:], M[2:, :2], M[2:, 2:]


def act(M, Z: np.ndarray) -> np.ndarray:
    """M.Z = (AZ + B)(CZ + D)^{-1}, symmetrized against roundoff."""
    A, B, C, D = _blocks(M)
    J = C @ Z + D
    if abs(np.linalg.det(J)) == 0:
        raise ZeroDivisionError("CZ + D is singular")
    W = (A @ Z + B) @ np.linalg.inv(J)
    return 0.5 * (W + W.T)


def act_point(M, Z: SiegelPoint) -> SiegelPoint:
    return SiegelPoint.from_complex(act(M, Z.Z))


def slash(F: Callable[[SiegelPoint], complex], k: int, M, Z: SiegelPoint) -> complex:
    """(F|_k M)(Z) = det(CZ + D)^{-k} F(M.Z)."""
    A, B, C, D = _blocks(M)
    j = np.linalg.det(C @ Z.Z + D)
    return j ** (-k) * F(act_point(M, Z))


def slash_general(F: Callable[[SiegelPoint], complex], alpha, beta, M, Z: SiegelPoint) -> complex:
    """det(CZ + D)^{-alpha} det(C Zbar + D)^{-beta} F(M.Z), alpha - beta integral."""
    diff = complex(alpha) - complex(beta)
    if diff.imag != 0 or diff.real != round(diff.real):
        raise ValueError("alpha - beta must be an integer")
    A, B, C, D = _blocks(M)
    j = np.linalg.det(C @ Z.Z + D)
    # j^{-alpha} jbar^{-beta} = j^{-(alpha-beta)} |j|^{-2 beta}
    return j ** (-int(round(diff.real))) * abs(j) ** (-2 * complex(beta)) * F(act_point(M, Z))


def sqrtm_sym(T: np.ndarray) -> np.ndarray:
    w, V = np.linalg.eigh(T)
    if np.any(w <= 0):
        raise ValueError("matrix is not positive definite")
    return (V * np.sqrt(w)) @ V.T


# ---------------------------------------------------------------- h integral

# multi-index (a, b, c) selects d^a/dy11^a d^b/dy12^b d^c/dy22^c
MultiIndex = tuple[int, int, int]


def multi_indices(max_order: int) -> list[MultiIndex]:
    return [(a, b, c) for n in range(max_order + 1)
            for a in range(n + 1) for b in range(n + 1 - a) for c in [n - a - b]]


def _nodes(beta: float, n: int, nw: int):
    x, wx = roots_genlaguerre(n, beta - 1.0)
    w, ww = roots_jacobi(nw, beta - 1.5, beta - 1.5)
    return x, wx, w, ww


def _h_raw(alpha: float, beta: float, T: np.ndarray, Ys: np.ndarray, n: int, nw: int,
           moments: Sequence[MultiIndex]) -> np.ndarray:
    """Derivatives d^m h(T; Y) for a batch of Y at fixed quadrature order.

    Substituting U = T^{1/2}(I + S)T^{1/2} and rotating S so that
    T^{1/2} Y T^{1/2} = R diag(mu) R^T, the S-integral runs over
    s1, s2 > 0 (generalized Laguerre after s_i = x / (2 pi mu_i)) and
    s12 = sqrt(s1 s2) w, |w| < 1 (Gauss-Jacobi absorbs det(S)^{beta-3/2}).
    """
    x, wx, w, ww = _nodes(beta, n, nw)
    Th = sqrtm_sym(T)
    detT = float(np.linalg.det(T))
    Yt = np.einsum("ij,bjk,kl->bil", Th, Ys, Th)
    mu, R = np.linalg.eigh(Yt)
    if np.any(mu <= 0):
        raise ValueError("Y must be positive definite")
    B = len(Ys)
    s1 = x[None, :, None, None] / (2 * np.pi * mu[:, 0, None, None, None])
    s2 = x[None, None, :, None] / (2 * np.pi * mu[:, 1, None, None, None])
    ww_ = w[None, None, None, :]
    r = np.sqrt(s1 * s2)
    A = (2 + s1) * (2 + s2) - r * r * ww_ ** 2
    f = A ** (alpha - 1.5)
    W = (wx[:, None, None] * wx[None, :, None] * ww[None, None, :])[None]
    pref = (detT ** (alpha + beta - 1.5) * np.exp(-2 * np.pi * (mu[:, 0] + mu[:, 1]))
            * (2 * np.pi * mu[:, 0]) ** (-beta) * (2 * np.pi * mu[:, 1]) ** (-beta))
    base = (W * f).reshape(B, -1)
    out = np.empty((B, len(moments)))
    if all(m == (0, 0, 0) for m in moments):
        out[:] = (base.sum(axis=1) * pref)[:, None]
        return out
    # U = T + Q S' Q^T with Q = Th R, S' = [[s1, r w], [r w, s2]], entrywise
    Q = np.einsum("ij,bjk->bik", Th, R)
    s12 = r * ww_

    def entry(i, j):
        q = lambda a, b: (Q[:, i, a] * Q[:, j, b])[:, None, None, None]
        return (T[i, j] + q(0, 0) * s1 + q(1, 1) * s2 + (q(0, 1) + q(1, 0)) * s12).reshape(B, -1)

    u = (-2 * np.pi * entry(0, 0), -4 * np.pi * entry(0, 1), -2 * np.pi * entry(1, 1))
    top = [max(m[v] for m in moments) for v in range(3)]
    pows = [[np.ones_like(base)] for _ in range(3)]
    for v in range(3):
        for _ in range(top[v]):
            pows[v].append(pows[v][-1] * u[v])
    for i, (a, b, c) in enumerate(moments):
        out[:, i] = (base * pows[0][a] * pows[1][b] * pows[2][c]).sum(axis=1) * pref
    return out


@dataclass(frozen=True)
class HResult:
    value: np.ndarray  # (batch, n_moments)
    error: np.ndarray
    order: np.ndarray  # Laguerre order used per batch element

    def to_dict(self) -> dict:
        return {"value": self.value.tolist(), "est_error": self.error.tolist(),
                "order": self.order.tolist()}


def h_batch(alpha: float, beta: float, T, Ys, q: QuadratureSpec = QuadratureSpec(),
            moments: Sequence[MultiIndex] = ((0, 0, 0),), strict: bool = True,
            chunk: int = 256) -> HResult:
    """h_{alpha,beta}(T; Y) and its Y-derivatives for a batch of Y.

    Orders double from q.base_order until successive results agree to
    q.rel_tol (on the largest-magnitude moment) or q.max_depth doublings.
    """
    if not (alpha > 0.5 and beta > 0.5):
        raise ValueError("h needs alpha, beta > 1/2")
    if beta - 0.5 < q.boundary_exponent_guard or alpha - 0.5 < q.boundary_exponent_guard:
        raise ValueError("exponent too close to the non-integrable boundary 1/2")
    T = T.as_array() if isinstance(T, SymMat2) else np.asarray(T, float)
    Ys = np.asarray([y.as_array() if isinstance(y, SymMat2) else y for y in Ys], float).reshape(-1, 2, 2)
    moments = list(moments)
    B = len(Ys)
    value = np.zeros((B, len(moments)))
    error = np.full((B, len(moments)), np.inf)
    order = np.zeros(B, dtype=int)

    def run(idx, n, nw):
        res = np.empty((len(idx), len(moments)))
        step = max(1, min(chunk, (1 << 21) // (n * n * nw)))
        for lo in range(0, len(idx), step):
            sel = idx[lo:lo + step]
            res[lo:lo + len(sel)] = _h_raw(alpha, beta, T, Ys[sel], n, nw, moments)
        return res

    pending = np.arange(B)
    n, nw = q.base_order, q.angular_order
    prev = run(pending, n, nw)
    for _ in range(q.max_depth):
        n2, nw2 = 2 * n, 2 * nw
        cur = run(pending, n2, nw2)
        diff = np.abs(cur - prev)
        scale = np.max(np.abs(cur), axis=1, keepdims=True)
        ok = np.all(diff <= q.rel_tol * scale + q.abs_tol, axis=1)
        value[pending], error[pending], order[pending] = cur, diff, n2
        pending, prev = pending[~ok], cur[~ok]
        n, nw = n2, nw2
        if len(pending) == 0:
            break
    if strict and len(pending):
        worst = float(np.max(error[pending] / np.maximum(np.abs(value[pending]), 1e-300)))
        raise QuadratureError(f"h not converged for {len(pending)} arguments (rel err {worst:.2e})")
    return HResult(value, error, order)


def h_integral(alpha: float, beta: float, T, Y, q: QuadratureSpec = QuadratureSpec()) -> float:
    """h_{alpha,beta}(T; Y) as a float."""
    return float(h_batch(alpha, beta, T, [Y], q).value[0, 0])


def h_integral_estimate(alpha: float, beta: float, T, Y, q: QuadratureSpec = QuadratureSpec()) -> tuple[float, float]:
    r = h_batch(alpha, beta, T, [Y], q)
    return float(r.value[0, 0]), float(r.error[0, 0])


# ------------------------------------------------------------- Fourier terms

def _as_T(T) -> np.ndarray:
    return T.as_array() if isinstance(T, SymMat2) else np.asarray(T, float)


def _check_T(T: np.ndarray):
    if not (T[0, 0] > 0 and np.linalg.det(T) > 0):
        raise ValueError("T must be positive definite")


def phi(l: int, T, Z: SiegelPoint) -> complex:
    """Phi_l(T; Z) = e^{2 pi i tr(TZ)}."""
    T = _as_T(T)
    return complex(np.exp(2j * np.pi * np.trace(T @ Z.Z)))


def psi(k: int, T, Z: SiegelPoint, q: QuadratureSpec = QuadratureSpec()) -> complex:
    """Psi_k(T; Z) = det(TY) h_{k+1,1}(T; Y) e^{2 pi i tr(TX)}."""
    if k <= 0 or k % 2:
        raise ValueError("k must be a positive even integer")
    T = _as_T(T)
    _check_T(T)
    Y = Z.Y.as_array()
    return (np.linalg.det(T @ Y) * h_integral(k + 1, 1, T, Y, q)
            * np.exp(2j * np.pi * np.trace(T @ Z.X.as_array())))


def psi_batch(k: int, T, Zs: np.ndarray, q: QuadratureSpec = QuadratureSpec(), strict: bool = True) -> np.ndarray:
    """Psi_k(T; Z) for an array of complex 2x2 matrices Z."""
    T = _as_T(T)
    _check_T(T)
    Zs = np.asarray(Zs, complex).reshape(-1, 2, 2)
    Ys, Xs = Zs.imag, Zs.real
    h = h_batch(k + 1, 1, T, Ys, q, strict=strict).value[:, 0]
    detTY = np.linalg.det(T) * np.linalg.det(Ys)
    return detTY * h * np.exp(2j * np.pi * np.einsum("ij,bji->b", T, Xs))


# --------------------------------------------------- finite-difference operators

_IDX = {(0, 0): 0, (0, 1): 1, (1, 0): 1, (1, 1): 2}


def _functional(a: int, b: int, sign: int) -> np.ndarray:
    """Coefficient vector of (d/dZ)_{ab} (sign=-1) or (d/dZbar)_{ab} (sign=+1)
    on the gradient in (x11, x12, x22, y11, y12, y22)."""
    c = 0.5 * (1 + (a == b))
    e = np.zeros(6, complex)
    e[_IDX[a, b]] = 0.5 * c
    e[3 + _IDX[a, b]] = sign * 0.5j * c
    return e


def _gradient(F, v: np.ndarray, s: np.ndarray) -> np.ndarray:
    g = None
    for i in range(6):
        e = np.zeros(6)
        e[i] = s[i]
        d = (np.asarray(F(SiegelPoint.from_coords(v + e)))
             - np.asarray(F(SiegelPoint.from_coords(v - e)))) / (2 * s[i])
        if g is None:
            g = np.zeros((6,) + np.shape(d), complex)
        g[i] = d
    return g


def _default_steps(v: np.ndarray, base: float) -> np.ndarray:
    return base * (1 + np.abs(v))


def apply_lowering(F: Callable[[SiegelPoint], complex], Z: SiegelPoint,
                   h_step: Optional[float] = None, check: bool = True) -> np.ndarray:
    """L F = Y (Y dF/dZbar)^T by central differences.

    F may be scalar or tensor valued; the new 2x2 slot is appended last.
    Step halving is used to detect roundoff domination.
    """
    v = Z.coords()
    base = 1e-4 if h_step is None else h_step
    Y = Z.Y.as_array()

    def once(b):
        g = _gradient(F, v, _default_steps(v, b))
        Db = np.empty((2, 2) + g.shape[1:], complex)
        for a in range(2):
            for c in range(2):
                Db[a, c] = np.tensordot(_functional(a, c, +1), g, axes=(0, 0))
        # (Y Db)^T_{ij} = sum_m Y_jm Db_mi ; L_ij = sum_p Y_ip (Y Db)^T_pj
        YDbT = np.einsum("jm,mi...->ij...", Y, Db)
        out = np.einsum("ip,pj...->ij...", Y, YDbT)
        return np.moveaxis(out, (0, 1), (-2, -1)), float(np.max(np.abs(g)))

    L1, g1 = once(base)
    if not check:
        return L1
    L2, g2 = once(base / 2)
    # The Zbar-derivative may cancel (exactly so for holomorphic F), so the
    # disagreement is judged against the size of the raw gradient it came from.
    scale = max(np.max(np.abs(L2)), 1e-3 * max(g1, g2) * np.max(np.abs(Y)) ** 2, 1e-300)
    if np.max(np.abs(L1 - L2)) > 1e-3 * scale:
        raise FloatingPointError("finite-difference lowering unstable under step halving")
    return L2


def _hessian(F, v: np.ndarray, s: np.ndarray):
    f0 = complex(F(SiegelPoint.from_coords(v)))
    g = np.zeros(6, complex)
    H = np.zeros((6, 6), complex)
    E = np.diag(s)
    ev = lambda u: complex(F(SiegelPoint.from_coords(u)))
    for i in range(6):
        fp, fm = ev(v + E[i]), ev(v - E[i])
        g[i] = (fp - fm) / (2 * s[i])
        H[i, i] = (fp - 2 * f0 + fm) / s[i] ** 2
        for j in range(i + 1, 6):
            H[i, j] = H[j, i] = (ev(v + E[i] + E[j]) - ev(v + E[i] - E[j])
                                 - ev(v - E[i] + E[j]) + ev(v - E[i] - E[j])) / (4 * s[i] * s[j])
    return g, H


def apply_omega(alpha, beta, F: Callable[[SiegelPoint], complex], Z: SiegelPoint,
                h_step: Optional[float] = None) -> np.ndarray:
    """Omega_{alpha,beta} F = -4 Y (Y dbar)^T d F - 2 i beta Y dF + 2 i alpha Y dbar F.

    Second differences with one Richardson extrapolation (steps s and s/2).
    """
    v = Z.coords()
    s = np.full(6, 1e-3 if h_step is None else h_step)
    g1, H1 = _hessian(F, v, s)
    g2, H2 = _hessian(F, v, s / 2)
    g, H = (4 * g2 - g1) / 3, (4 * H2 - H1) / 3
    Y = Z.Y.as_array()
    d = {(a, b): _functional(a, b, -1) for a in range(2) for b in range(2)}
    db = {(a, b): _functional(a, b, +1) for a in range(2) for b in range(2)}
    out = np.zeros((2, 2), complex)
    for i in range(2):
        for j in range(2):
            acc = 0j
            for m in range(2):
                for l in range(2):
                    for k in range(2):
                        acc += -4 * Y[i, m] * Y[l, k] * (db[k, m] @ H @ d[l, j])
                acc += -2j * complex(beta) * Y[i, m] * (d[m, j] @ g) + 2j * complex(alpha) * Y[i, m] * (db[m, j] @ g)
            out[i, j] = acc
    return out


# ------------------------------------------------ structured iterated lowering

# Polynomial-times-derivative expressions: {(i11, i12, i22, a, b, c): coeff}
# standing for y11^i11 y12^i12 y22^i22 * d^{(a,b,c)} h(T; Y).
PolyH = dict


def _poly_add(acc: PolyH, key, c):
    if c != 0:
        acc[key] = acc.get(key, 0) + c


def _poly_dy(p: PolyH, var: int) -> PolyH:
    """d/dy_var of a PolyH expression, var in {0: y11, 1: y12, 2: y22}."""
    out: PolyH = {}
    for key, c in p.items():
        mono, der = list(key[:3]), list(key[3:])
        if mono[var]:
            m2 = mono.copy()
            m2[var] -= 1
            _poly_add(out, (*m2, *der), c * mono[var])
        d2 = der.copy()
        d2[var] += 1
        _poly_add(out, (*mono, *d2), c)
    return out


def _poly_times_y(p: PolyH, entry: tuple[int, int]) -> PolyH:
    var = _IDX[entry]
    out: PolyH = {}
    for key, c in p.items():
        k2 = list(key)
        k2[var] += 1
        _poly_add(out, tuple(k2), c)
    return out


def _poly_lin(terms) -> PolyH:
    out: PolyH = {}
    for coeff, p in terms:
        if coeff == 0:
            continue
        for key, c in p.items():
            _poly_add(out, key, coeff * c)
    return out


def _lower_poly(p: PolyH, T: np.ndarray) -> dict:
    """One lowering of e(tr TX) p(Y): returns {(i, j): PolyH} for
    Y (pi i T p + (i/2) dY p) Y, with dY = [[d11, d12/2], [d12/2, d22]]."""
    d11, d12, d22 = _poly_dy(p, 0), _poly_dy(p, 1), _poly_dy(p, 2)
    Mmat = {}
    for a in range(2):
        for b in range(2):
            der = d11 if (a, b) == (0, 0) else d22 if (a, b) == (1, 1) else d12
            half = 0.5 if a != b else 1.0
            Mmat[a, b] = _poly_lin([(np.pi * 1j * T[a, b], p), (0.5j * half, der)])
    out = {}
    for i in range(2):
        for j in range(2):
            terms = []
            for pp in range(2):
                for r in range(2):
                    terms.append((1.0, _poly_times_y(_poly_times_y(Mmat[pp, r], (i, pp)), (r, j))))
            out[i, j] = _poly_lin(terms)
    return out


def psi_lowering_tower(T, d_max: int) -> list[dict]:
    """Symbolic L^d of Psi_k(T; .) / e(tr TX) for d = 0..d_max.

    Entry d maps a slot tuple (i1, j1, ..., id, jd) to a PolyH; the
    exponential factor e(tr TX) is left implicit.  Psi's polynomial part is
    det(TY) h(Y), independent of k apart from h's parameters.
    """
    T = _as_T(T)
    detT = float(np.linalg.det(T))
    base: PolyH = {}
    _poly_add(base, (1, 0, 1, 0, 0, 0), detT)
    _poly_add(base, (0, 2, 0, 0, 0, 0), -detT)
    tower = [{(): base}]
    for _ in range(d_max):
        nxt = {}
        for slots, p in tower[-1].items():
            for (i, j), q in _lower_poly(p, T).items():
                if q:
                    nxt[slots + (i, j)] = q
        tower.append(nxt)
    return tower


def evaluate_tower_level(level: dict, Ys: np.ndarray, hmoments: np.ndarray, index: dict,
                         d: int, absolute: bool = False) -> np.ndarray:
    """Evaluate one tower level on a batch: returns (batch, 2, 2, ..., 2) with 2d slots.

    With ``absolute`` every coefficient and monomial enters by modulus, which
    turns moment error estimates into an error bound for the tensor.
    """
    Ys = np.asarray(Ys).reshape(-1, 2, 2)
    B = len(Ys)
    y11, y12, y22 = Ys[:, 0, 0], Ys[:, 0, 1], Ys[:, 1, 1]
    if absolute:
        y11, y12, y22, hmoments = abs(y11), abs(y12), abs(y22), abs(hmoments)
        level = {sl: {key: abs(c) for key, c in p.items()} for sl, p in level.items()}
    out = np.zeros((B,) + (2,) * (2 * d), complex)
    pw = {}

    def power(v, arr, e):
        if (v, e) not in pw:
            pw[v, e] = arr ** e
        return pw[v, e]

    for slots, p in level.items():
        acc = np.zeros(B, complex)
        for (i11, i12, i22, a, b, c), coeff in p.items():
            acc += coeff * power(0, y11, i11) * power(1, y12, i12) * power(2, y22, i22) * hmoments[:, index[a, b, c]]
        out[(slice(None),) + slots] = acc
    return out


def lowered_psi(k: int, T, Zs, d: int, q: QuadratureSpec = QuadratureSpec(), strict: bool = True,
                tower: Optional[list] = None) -> np.ndarray:
    """(L^d Psi_k(T; .))(Z) for a batch of complex Z, as tensors with 2d slots."""
    T = _as_T(T)
    Zs = np.asarray(Zs, complex).reshape(-1, 2, 2)
    tower = psi_lowering_tower(T, d) if tower is None else tower
    mis = multi_indices(d)
    index = {m: i for i, m in enumerate(mis)}
    H = h_batch(k + 1, 1, T, Zs.imag, q, moments=mis, strict=strict).value
    e = np.exp(2j * np.pi * np.einsum("ij,bji->b", T, Zs.real))
    vals = evaluate_tower_level(tower[d], Zs.imag, H, index, d)
    return vals * e.reshape((-1,) + (1,) * (2 * d))


# ------------------------------------------------------------- Shimura-type fit

@dataclass(frozen=True)
class ShimuraFit:
    b: float
    C: float
    y_grid: tuple
    ratios: tuple

    def to_dict(self) -> dict:
        return {"b_fit": self.b, "C_fit": self.C, "provenance": "empirical fit"}


def shimura_fit(k: int, T=None, y_grid: Optional[Sequence[float]] = None,
                q: QuadratureSpec = QuadratureSpec()) -> ShimuraFit:
    """Fit det(TY) h_{k+1,1}(T; Y) <= C (1 + det(Y)^{-b}) e^{-pi tr(TY)} over diagonal Y.

    b is the log-log slope of the bound's left side against det(Y) over the
    smallest-determinant decade of the grid; C is the smallest constant that
    makes the bound hold on every grid point with that b.
    """
    T = np.eye(2) if T is None else _as_T(T)
    if y_grid is None:
        y_grid = np.geomspace(0.05, 4.0, 9)
    pts = [(a, c) for a in y_grid for c in y_grid]
    Ys = np.array([np.diag([a, c]) for a, c in pts])
    h = h_batch(k + 1, 1, T, Ys, q).value[:, 0]
    det = np.linalg.det(Ys)
    lhs = np.linalg.det(T) * det * h
    ratio = lhs * np.exp(np.pi * np.einsum("ij,bji->b", T, Ys))
    # slope along the diagonal Y = y I, where det(Y) = y^2 is smallest
    diag = np.array([i for i, (a, c) in enumerate(pts) if a == c])
    small = diag[np.argsort(det[diag])][:3]
    slope = np.polyfit(np.log(det[small]), np.log(ratio[small]), 1)[0]
    b = max(0.0, -slope)
    C = float(np.max(ratio / (1 + det ** (-b))))
    return ShimuraFit(float(b), C, tuple(map(float, y_grid)), tuple(map(float, ratio)))
