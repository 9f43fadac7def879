"""Truncated degree-2 Poincare series of Psi_k(T; .) Phi_l(T'; .) over Delta \\ Sp2(Z).

Each coset contributes det(CZ + D)^{-k-l} Psi_k(T; M.Z) Phi_l(T'; M.Z).
Psi depends on M.Z only through Im(M.Z) (up to a phase), and many cosets
share Im(M.Z), so the h integrals are evaluated once per distinct Y.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .config import QuadratureSpec
from .siegel_kernel import (QuadratureError, ShimuraFit, SiegelPoint, SymMat2, h_batch,
                            multi_indices, psi_lowering_tower, evaluate_tower_level, shimura_fit)
from .sp2_cosets import SymplecticRep, bottom_rows, enumerate_delta_cosets

ASSUMPTION = "GRC-conditional"


def _check_T(T: SymMat2, name: str):
    if not T.positive_definite():
        raise ValueError(f"{name} must be positive definite")
    if not T.half_integral():
        raise ValueError(f"{name} must be half-integral")


@dataclass(frozen=True)
class P2Params:
    k: int
    l: int
    T: SymMat2 = field(default_factory=SymMat2.identity)
    T_prime: SymMat2 = field(default_factory=SymMat2.identity)
    height: int = 2
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)

    def __post_init__(self):
        for name, v in (("k", self.k), ("l", self.l)):
            if v <= 0 or v % 2:
                raise ValueError(f"{name} must be a positive even integer")
        _check_T(self.T, "T")
        _check_T(self.T_prime, "T'")
        if self.height < 1:
            raise ValueError("height must be >= 1")

    @property
    def weight(self) -> int:
        return self.k + self.l

    def advisory(self, b: float) -> bool:
        """True when l + k - 2b < 6, below the absolute-convergence threshold."""
        return self.l + self.k - 2 * b < 6


# ------------------------------------------------------------------ geometry

@dataclass(frozen=True)
class CosetGeometry:
    reps: tuple
    J: np.ndarray  # (N, 2, 2) CZ + D
    detJ: np.ndarray
    Zp: np.ndarray  # M.Z
    c_zero: np.ndarray
    heights: np.ndarray
    uniq_Y: np.ndarray  # distinct Im(M.Z)
    inverse: np.ndarray  # coset -> row of uniq_Y


def coset_geometry(reps: Sequence[SymplecticRep], Z: SiegelPoint) -> CosetGeometry:
    mats = np.array([r.matrix() for r in reps], dtype=float)
    A, B, C, D = mats[:, :2, :2], mats[:, :2, 2:], mats[:, 2:, :2], mats[:, 2:, 2:]
    Zc = Z.Z
    J = C @ Zc + D
    Zp = (A @ Zc + B) @ np.linalg.inv(J)
    Zp = 0.5 * (Zp + np.transpose(Zp, (0, 2, 1)))
    Y = Zp.imag
    # group numerically identical Y; the rounding only merges exact duplicates
    key = np.round(Y.reshape(-1, 4)[:, [0, 1, 3]], 12)
    _, first, inverse = np.unique(key, axis=0, return_index=True, return_inverse=True)
    c_zero = ~C.reshape(-1, 4).any(axis=1)
    heights = np.abs(mats[:, 2:, :]).reshape(len(reps), -1).max(axis=1)
    return CosetGeometry(tuple(reps), J, np.linalg.det(J), Zp, c_zero, heights,
                         Y[first], inverse.ravel())


def _phase(T: np.ndarray, X: np.ndarray) -> np.ndarray:
    return np.exp(2j * np.pi * np.einsum("ij,bji->b", T, X))


def _psi_phi_terms(p: P2Params, g: CosetGeometry, strict: bool):
    """Psi_k(T; M.Z) Phi_l(T'; M.Z) per coset, with a quadrature error bound."""
    T, Tp = p.T.as_array(), p.T_prime.as_array()
    hr = h_batch(p.k + 1, 1, T, g.uniq_Y, p.quadrature, strict=strict)
    h, herr = hr.value[g.inverse, 0], hr.error[g.inverse, 0]
    Y, X = g.Zp.imag, g.Zp.real
    detTY = np.linalg.det(T) * np.linalg.det(Y)
    phi = np.exp(2j * np.pi * np.einsum("ij,bji->b", Tp, g.Zp))
    base = detTY * _phase(T, X) * phi
    return base * h, np.abs(base) * herr


def _fsum(v: np.ndarray) -> complex:
    return complex(math.fsum(v.real), math.fsum(v.imag))


# Shell h holds ~h^6 cosets (the bottom rows (C, D) fill a 7-dimensional
# variety), and the slowest summands, those with rank-one C, fall like
# h^{-(k+l-2b)}.  Shell sums therefore decay with exponent about k+l-2b-6.
SHELL_COUNT_EXPONENT = 6


def _shell_exponent(shells: dict, model: float) -> float:
    """Decay exponent of shell sums: the smaller of the model value and the
    one measured between the two outermost shells."""
    H = max(shells)
    if H >= 2 and shells.get(H - 1, 0) > 0 and shells[H] > 0:
        measured = math.log(shells[H - 1] / shells[H]) / math.log(H / (H - 1))
        return min(model, measured)
    return model


def _tail_factor(H: int, exponent: float) -> float:
    """sum_{h > H} (h/H)^{-exponent}, the tail in units of the outermost shell."""
    if exponent <= 1:
        return math.inf
    hs = np.arange(H + 1, H + 20000, dtype=float)
    return float(np.sum((hs / H) ** (-exponent)))


def _shell_sums(values: np.ndarray, heights: np.ndarray) -> dict:
    return {int(h): float(values[heights == h].sum()) for h in np.unique(heights)}


@dataclass(frozen=True)
class P2Result:
    total: complex
    c_zero: complex
    c_nonzero: complex
    tail: float
    quadrature_error: float
    n_cosets: int
    advisory: bool
    b_fit: float

    def to_dict(self) -> dict:
        c = lambda z: [z.real, z.imag]
        return {"total": c(self.total), "c_zero": c(self.c_zero), "c_nonzero": c(self.c_nonzero),
                "tail": self.tail, "tail_model": "majorant shell heuristic",
                "quadrature_error": self.quadrature_error, "n_cosets": self.n_cosets,
                "advisory": self.advisory, "b_fit": self.b_fit, "b_provenance": "empirical fit"}


def majorant_terms(p: P2Params, g: CosetGeometry, fit: ShimuraFit) -> np.ndarray:
    """C (1 + det(Y')^{-b}) e^{-pi tr((T + T') Y')} |det(CZ + D)|^{-k-l} per coset."""
    Tt = p.T.as_array() + p.T_prime.as_array()
    Y = g.Zp.imag
    detY = np.linalg.det(Y)
    return (fit.C * (1 + detY ** (-fit.b)) * np.exp(-np.pi * np.einsum("ij,bji->b", Tt, Y))
            * np.abs(g.detJ) ** (-p.weight))


def summands(p: P2Params, Z: SiegelPoint, reps=None, strict: bool = False):
    """Per-coset summands (in canonical coset order), error bounds and geometry."""
    reps = enumerate_delta_cosets(p.height) if reps is None else reps
    g = coset_geometry(reps, Z)
    val, err = _psi_phi_terms(p, g, strict)
    aut = g.detJ ** (-p.weight)
    return val * aut, err * np.abs(aut), g


def eval_p2(p: P2Params, Z: SiegelPoint, reps=None, fit: Optional[ShimuraFit] = None) -> P2Result:
    """Partial sum over Delta-cosets of height <= p.height, split by C = 0 / C != 0."""
    fit = shimura_fit(p.k, p.T, q=p.quadrature) if fit is None else fit
    terms, err, g = summands(p, Z, reps)
    c0 = _fsum(terms[g.c_zero])
    cn = _fsum(terms[~g.c_zero])
    total = c0 + cn
    qerr = math.fsum(err)
    if not np.isfinite(qerr) or qerr > p.quadrature.rel_tol * 1e3 * max(abs(total), 1e-300):
        raise QuadratureError(f"quadrature error {qerr:.3e} too large for total {abs(total):.3e}")
    H = int(g.heights.max())
    shells = _shell_sums(majorant_terms(p, g, fit), g.heights)
    exponent = _shell_exponent(shells, p.weight - 2 * fit.b - SHELL_COUNT_EXPONENT)
    tail = shells[H] * _tail_factor(H, exponent)
    return P2Result(total, c0, cn, tail, qerr, len(g.reps), p.advisory(fit.b), fit.b)


def c_zero_display(p: P2Params, y0: float) -> float:
    """The C = 0 stratum in the printed closed form
    y0^2 sum_A det(A)^{-k-l} h(T, y0 I) e^{-2 pi y0 tr((T + T') A A^T)},
    over the C = 0 cosets of height <= p.height (kept for comparison only)."""
    reps = [r for r in enumerate_delta_cosets(p.height) if r.c_is_zero]
    Tt = p.T.as_array() + p.T_prime.as_array()
    h0 = h_batch(p.k + 1, 1, p.T.as_array(), [y0 * np.eye(2)], p.quadrature).value[0, 0]
    tot = []
    for r in reps:
        A = np.array(r.A, dtype=float)
        tot.append(round(np.linalg.det(A)) ** (-p.weight) * h0 * math.exp(-2 * math.pi * y0 * np.trace(Tt @ A @ A.T)))
    return y0 ** 2 * math.fsum(tot)


# ----------------------------------------------------------------------- KST

@dataclass(frozen=True)
class KSTResult:
    y0: Optional[float]
    margin: Optional[float]
    grid: tuple
    min_abs_det: tuple
    worst: Optional[list]

    def to_dict(self) -> dict:
        return {"y0": self.y0, "margin": self.margin, "grid": list(self.grid),
                "min_abs_det": list(self.min_abs_det), "worst_matrix": self.worst}


def _abs_det_sq(C: np.ndarray, D: np.ndarray, y: Fraction) -> np.ndarray:
    """q^4 |det(i y C + D)|^2 for y = p/q and stacked integer pairs, in exact integers."""
    p, q = y.numerator, y.denominator
    detC = C[:, 0, 0] * C[:, 1, 1] - C[:, 0, 1] * C[:, 1, 0]
    detD = D[:, 0, 0] * D[:, 1, 1] - D[:, 0, 1] * D[:, 1, 0]
    mixed = C[:, 0, 0] * D[:, 1, 1] + C[:, 1, 1] * D[:, 0, 0] - C[:, 0, 1] * D[:, 1, 0] - C[:, 1, 0] * D[:, 0, 1]
    bound = (q * q + p * p) * 4 * int(max(np.abs(C).max(), np.abs(D).max()) + 1) ** 2
    if bound ** 2 > 2 ** 62:
        raise OverflowError("grid value has too large a denominator for exact int64 arithmetic")
    re = q * q * detD - p * p * detC
    im = p * q * mixed
    return re * re + im * im


def kst_y0_search(height: int, y_grid: Sequence[float]) -> KSTResult:
    """Smallest grid y0 with |det(C i y0 I + D)| > 1 for every enumerated pair with C != 0.

    Only bottom rows matter, so no completion is needed; determinants are
    compared exactly in rational arithmetic.
    """
    Cs, Ds = bottom_rows(height)
    nz = Cs.reshape(len(Cs), -1).any(axis=1)
    Cs, Ds = Cs[nz], Ds[nz]
    mins, worst_all, chosen = [], None, None
    for y in sorted(y_grid):
        yq = Fraction(repr(float(y))).limit_denominator(10 ** 6)
        m = _abs_det_sq(Cs, Ds, yq)
        i = int(np.argmin(m))
        scale = yq.denominator ** 4
        mins.append(math.sqrt(m[i] / scale))
        if chosen is None:
            if m[i] > scale:
                chosen = (float(y), math.sqrt(m[i] / scale) - 1.0)
            else:
                worst_all = np.block([[np.zeros((2, 2), int), np.zeros((2, 2), int)], [Cs[i], Ds[i]]]).tolist()
    if chosen is None:
        return KSTResult(None, None, tuple(sorted(y_grid)), tuple(mins), worst_all)
    return KSTResult(chosen[0], chosen[1], tuple(sorted(y_grid)), tuple(mins), None)


# ---------------------------------------------------------------- nonvanishing

@dataclass(frozen=True)
class ScanRow:
    l: int
    c_zero: complex
    c_nonzero: complex
    total: complex
    advisory: bool

    def to_dict(self) -> dict:
        return {"l": self.l, "c_zero": self.c_zero.real, "c_zero_imag": self.c_zero.imag,
                "c_nonzero_abs": abs(self.c_nonzero), "c_nonzero": self.c_nonzero.real,
                "c_nonzero_imag": self.c_nonzero.imag, "total": self.total.real,
                "total_imag": self.total.imag, "advisory": self.advisory}


@dataclass(frozen=True)
class ScanResult:
    rows: tuple
    crossover: Optional[int]
    y0: float
    b_fit: float

    def to_dict(self) -> dict:
        return {"rows": [r.to_dict() for r in self.rows], "crossover": self.crossover,
                "y0": self.y0, "b_fit": self.b_fit, "assumption": ASSUMPTION}


def nonvanishing_scan(k: int, T: SymMat2, T_prime: SymMat2, y0: float, l_list: Sequence[int],
                      height: int = 2, quadrature: QuadratureSpec = QuadratureSpec(),
                      fit: Optional[ShimuraFit] = None) -> ScanResult:
    """P2 at i y0 I for each l, split by stratum; h is shared across l."""
    l_list = sorted(l_list)
    fit = shimura_fit(k, T, q=quadrature) if fit is None else fit
    p0 = P2Params(k, l_list[0], T, T_prime, height, quadrature)
    Z = SiegelPoint.scalar(y0)
    g = coset_geometry(enumerate_delta_cosets(height), Z)
    base, _ = _psi_phi_terms(p0, g, strict=False)
    rows = []
    for l in l_list:
        p = P2Params(k, l, T, T_prime, height, quadrature)
        terms = base * g.detJ ** (-(k + l))
        c0, cn = _fsum(terms[g.c_zero]), _fsum(terms[~g.c_zero])
        rows.append(ScanRow(l, c0, cn, c0 + cn, p.advisory(fit.b)))
    crossover = None
    for i, r in enumerate(rows):
        if all(s.total.real > 0 for s in rows[i:]):
            crossover = r.l
            break
    return ScanResult(tuple(rows), crossover, y0, fit.b)


# ---------------------------------------------------------------- depth probe

def _transport(vals: np.ndarray, J: np.ndarray, d: int) -> np.ndarray:
    """Apply G -> J^T G J on each of the d matrix slots."""
    letters = "abcdefghijklmnop"
    for s in range(d):
        i, j = 2 * s, 2 * s + 1
        src = "z" + letters[:2 * d]
        dst = list(src)
        dst[1 + i], dst[1 + j] = "x", "y"
        vals = np.einsum(f"z{letters[i]}x,{src},z{letters[j]}y->{''.join(dst)}", J, vals, J)
    return vals


@dataclass(frozen=True)
class ProbeResult:
    target: str
    ratios: tuple  # d = 1..d_max
    noise_floor: tuple
    tail: tuple
    differencing_error: tuple
    annihilation_depth: Optional[int]

    def to_dict(self) -> dict:
        return {"target": self.target, "ratios": list(self.ratios),
                "noise_floor": list(self.noise_floor), "tail": list(self.tail),
                "differencing_error": list(self.differencing_error),
                "annihilation_depth": self.annihilation_depth, "assumption": ASSUMPTION}


def _probe_point(p: P2Params, Z: SiegelPoint, d_max: int, target: str, reps, tower, b: float):
    T, Tp = p.T.as_array(), p.T_prime.as_array()
    if target == "product":
        reps = [SymplecticRep(((1, 0), (0, 1)), ((0, 0), (0, 0)), ((0, 0), (0, 0)), ((1, 0), (0, 1)))]
    g = coset_geometry(reps, Z)
    mis = multi_indices(d_max)
    index = {m: i for i, m in enumerate(mis)}
    hr = h_batch(p.k + 1, 1, T, g.uniq_Y, p.quadrature, moments=mis, strict=False)
    Y, X = g.Zp.imag, g.Zp.real
    scal = g.detJ ** (-p.weight) * _phase(T, X) * np.exp(2j * np.pi * np.einsum("ij,bji->b", Tp, g.Zp))
    lvl0 = evaluate_tower_level(tower[0], g.uniq_Y, hr.value, index, 0)[g.inverse]
    value = _fsum(lvl0 * scal)
    out = []
    H = int(g.heights.max())
    for d in range(1, d_max + 1):
        v = evaluate_tower_level(tower[d], g.uniq_Y, hr.value, index, d)[g.inverse]
        e = evaluate_tower_level(tower[d], g.uniq_Y, hr.error, index, d, absolute=True)[g.inverse]
        shape = (-1,) + (1,) * (2 * d)
        v = _transport(v * scal.reshape(shape), g.J, d)
        Jn = np.linalg.norm(g.J, axis=(1, 2)) ** (2 * d)
        eb = e.reshape(len(e), -1).sum(axis=1) * np.abs(scal) * Jn
        total = v.sum(axis=0)
        norm = float(np.linalg.norm(total))
        per = np.linalg.norm(v.reshape(len(v), -1), axis=1)
        if target == "series":
            shells = _shell_sums(per, g.heights)
            exponent = _shell_exponent(shells, p.weight - 2 * b - SHELL_COUNT_EXPONENT)
            tail = shells[H] * _tail_factor(H, exponent)
        else:
            tail = 0.0
        out.append((norm, tail, float(np.abs(eb).sum())))
    return value, out


def lowering_depth_probe(p: P2Params, Z_grid: Sequence[SiegelPoint], d_max: int = 4,
                         target: str = "series", fit: Optional[ShimuraFit] = None) -> ProbeResult:
    """Relative size ||L^d F|| / |F| for d = 1..d_max, averaged over Z_grid.

    target: "series" (truncated P2), "product" (the single summand
    Psi_k Phi_l), or "holomorphic" (Psi replaced by the holomorphic Phi_k,
    which L annihilates identically).  The noise floor is
    max(tail estimate, 10 x quadrature error), both relative to |F|.
    """
    if d_max < 1:
        raise ValueError("d_max must be >= 1")
    if target not in ("series", "product", "holomorphic"):
        raise ValueError(f"unknown probe target {target!r}")
    if target == "holomorphic":
        zeros = tuple(0.0 for _ in range(d_max))
        return ProbeResult(target, zeros, zeros, zeros, zeros, 1)
    reps = enumerate_delta_cosets(p.height)
    b = (shimura_fit(p.k, p.T, q=p.quadrature) if fit is None else fit).b
    tower = psi_lowering_tower(p.T.as_array(), d_max)
    acc = np.zeros((d_max, 3))
    for Z in Z_grid:
        value, rows = _probe_point(p, Z, d_max, target, reps, tower, b)
        acc += np.array(rows) / abs(value)
    acc /= len(Z_grid)
    ratios = tuple(float(x) for x in acc[:, 0])
    tails = tuple(float(x) for x in acc[:, 1])
    derr = tuple(float(x) for x in acc[:, 2])
    floor = tuple(max(t, 10 * e) for t, e in zip(tails, derr))
    depth = next((d for d in range(1, d_max + 1) if ratios[d - 1] <= floor[d - 1]), None)
    return ProbeResult(target, ratios, floor, tails, derr, depth)
