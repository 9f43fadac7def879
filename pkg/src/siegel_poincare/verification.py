"""The twelve acceptance checks, shared by the test suite and ``verify-all``.

Every check returns a CheckResult carrying the measured quantities, the
threshold it was held to and the wall-clock time against its budget.  A
check passes only when both the numerical condition and the time budget hold.
"""
from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import exact_terms as et
from . import gk_support as gk
from . import oracles
from .config import QuadratureSpec
from .elliptic_poincare import numeric_lower, numeric_raise, spectral_pairing_check
from .poincare2 import P2Params, kst_y0_search, lowering_depth_probe, nonvanishing_scan
from .siegel_kernel import SiegelPoint, SymMat2, apply_omega, h_integral_estimate, psi
from .sp2_cosets import delta_equivalent, enumerate_delta_cosets

KST_GRID = (1.1, 1.5, 2.0, 3.0)


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    runtime: float
    budget: float
    detail: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"[{status}] criterion {self.number:2d}: {self.name} "
                f"({self.runtime:.2f}s / {self.budget:g}s)")

    def to_dict(self) -> dict:
        return {"number": self.number, "name": self.name, "passed": self.passed,
                "runtime": self.runtime, "budget": self.budget, "detail": self.detail}


def _timed(number: int, name: str, budget: float, body: Callable[[], tuple[bool, dict]]) -> CheckResult:
    t0 = time.perf_counter()
    ok, detail = body()
    dt = time.perf_counter() - t0
    return CheckResult(number, name, bool(ok) and dt < budget, dt, budget, detail)


# ------------------------------------------------------------------ 1: exact

def _lower_n(f: et.WeightedFunction, n: int) -> et.WeightedFunction:
    for _ in range(n):
        f = et.lower(f)
    return f


def check_exact_identities() -> CheckResult:
    def body():
        failures = []
        counts = dict(phi=0, product=0, lr=0, psi_tilde=0)
        for k in range(-10, 11, 2):
            for d in range(0, 4):
                for n in range(1, 6):
                    counts["phi"] += 1
                    if not _lower_n(et.make_phi(k, d, n), d + 1).is_zero():
                        failures.append(("phi", k, d, n))
        for k in range(0, 11, 2):
            for n in range(1, 6):
                counts["lr"] += 1
                if not et.lower(et.raise_(et.make_psi(k, n))).is_zero():
                    failures.append(("LR psi", k, n))
                for m in range(1, 6):
                    counts["product"] += 1
                    prod = et.multiply(et.make_psi(k, n), et.make_phi(12, 0, m))
                    if not _lower_n(prod, k + 1).is_zero():
                        failures.append(("psi*phi", k, n, m))
        plus_sign_holds = []
        for k in range(-10, 1, 2):
            for n in range(-5, 0):
                counts["psi_tilde"] += 1
                lhs = et.lower(et.make_psi_tilde(k, n))
                c = et.Coefficient.of(Fraction(4 * abs(n)) ** (1 - k), 0, 1 - k)
                target = et.make_phi_tilde(k - 2, -n, check_range=False).expr.scale(c)
                if not (lhs.weight == k - 2 and lhs.expr.equals(-target)):
                    failures.append(("L psi_tilde", k, n))
                plus_sign_holds.append(lhs.expr.equals(target))
        return not failures, {"cases": counts, "failures": failures[:10],
                              "relation_sign": "-", "plus_sign_ever_holds": any(plus_sign_holds)}
    return _timed(1, "exact operator identities", 1.0, body)


# --------------------------------------------------------- 2: numeric vs exact

def _random_term(rng: random.Random) -> et.WeightedFunction:
    kind = rng.choice(["phi", "psi", "phi_tilde", "psi_tilde"])
    if kind == "phi":
        return et.make_phi(2 * rng.randint(-3, 6), rng.randint(0, 3), rng.randint(1, 3))
    if kind == "psi":
        return et.make_psi(2 * rng.randint(0, 4), rng.randint(1, 3))
    if kind == "phi_tilde":
        return et.make_phi_tilde(-2 * rng.randint(1, 4), -rng.randint(1, 3))
    return et.make_psi_tilde(-2 * rng.randint(0, 4), -rng.randint(1, 3))


def check_numeric_operators(samples: int = 100, seed: int = 7) -> CheckResult:
    def body():
        rng = random.Random(seed)
        worst = 0.0
        for _ in range(samples):
            f = _random_term(rng)
            tau = complex(rng.uniform(-0.5, 0.5), rng.uniform(0.6, 2.0))
            F = lambda t, f=f: f.expr.evaluate_many(np.asarray(t))
            scale = abs(et.evaluate(f, tau))
            for exact, numeric in ((et.lower(f), numeric_lower(F, tau)),
                                   (et.raise_(f), numeric_raise(F, f.weight, tau))):
                ex = et.evaluate(exact, tau)
                worst = max(worst, abs(ex - numeric) / max(abs(ex), scale))
        return worst <= 1e-6, {"samples": samples, "max_rel_err": worst, "tol": 1e-6}
    return _timed(2, "central-difference L, R agree with exact operators", 5.0, body)


# ---------------------------------------------------------- 3: spectral pairing

PAIRING_TUPLES = ((-2, 8, 0.75, 1, 2), (-4, 10, 1.25, 1, 3), (-2, 6, 1.5, 0, 1),
                  (-6, 12, 2.0, 2, 3), (-4, 10, 0.6, -1, 1))


def check_spectral_pairing() -> CheckResult:
    def body():
        rows = [(t, spectral_pairing_check(*t).rel_err) for t in PAIRING_TUPLES]
        worst = max(r for _, r in rows)
        return worst <= 1e-8, {"rel_err": {str(t): r for t, r in rows}, "tol": 1e-8}
    return _timed(3, "spectral-pairing identity", 10.0, body)


# ----------------------------------------------------------- 4: Clebsch-Gordan

def check_clebsch_gordan(seed: int = 11) -> CheckResult:
    def body():
        bad = []
        for r1 in range(11):
            for r2 in range(11):
                for b1, b2 in ((0, 0), (-3, 2)):
                    t1, t2 = gk.KType(b1 + r1, b1), gk.KType(b2 + r2, b2)
                    out = gk.clebsch_gordan(t1, t2)
                    if sum(t.dim for t in out) != t1.dim * t2.dim:
                        bad.append(("dim", t1, t2))
                    for t in out:
                        if t.a + t.b != t1.a + t1.b + t2.a + t2.b:
                            bad.append(("sum", t1, t2, t))
                        if not abs(r1 - r2) <= t.a - t.b <= r1 + r2:
                            bad.append(("range", t1, t2, t))
        rng = random.Random(seed)
        oracle_bad = []
        for _ in range(20):
            b1, b2 = rng.randint(-5, 5), rng.randint(-5, 5)
            t1, t2 = gk.KType(b1 + rng.randint(0, 10), b1), gk.KType(b2 + rng.randint(0, 10), b2)
            got = {t: 1 for t in gk.clebsch_gordan(t1, t2)}
            if got != oracles.character_decomposition(t1, t2):
                oracle_bad.append((t1, t2))
        return not bad and not oracle_bad, {"constraint_failures": bad[:5],
                                            "oracle_mismatches": oracle_bad}
    return _timed(4, "Clebsch-Gordan dimension, constraints and character oracle", 5.0, body)


# ------------------------------------------------------------- 5: wall rules

def _random_support(rng: random.Random, lo: int, direction: str, x: int) -> list[gk.KType]:
    """A random nonempty set of K-types in the 12 x 12 window [lo, lo+11]^2 obeying one wall."""
    cells = [gk.KType(a, b) for a in range(lo, lo + 12) for b in range(lo, lo + 12)
             if a >= b and gk.wall_holds(gk.KType(a, b), (direction, x))]
    if not cells:
        return []
    return rng.sample(cells, rng.randint(1, min(6, len(cells))))


def check_wall_propagation(samples: int = 1000, seed: int = 13) -> CheckResult:
    def body():
        rng = random.Random(seed)
        bad, tried = [], 0
        while tried < samples:
            lo = rng.randint(-6, 0)
            (d1, d2), concl = rng.choice([(("right", "up"), "right"), (("left", "down"), "down")])
            x1, x2 = rng.randint(lo, lo + 11), rng.randint(lo, lo + 11)
            k1, k2 = _random_support(rng, lo, d1, x1), _random_support(rng, lo, d2, x2)
            if not k1 or not k2:
                continue
            tried += 1
            s = gk.tensor_ktype_support(gk.KTypeSupport.of(k1, [(d1, x1)]),
                                        gk.KTypeSupport.of(k2, [(d2, x2)]))
            wall = (concl, x1 + x2)
            # the conclusion is checked against the oracle decomposition, not the CG formula
            products = [t for t1 in k1 for t2 in k2 for t in oracles.character_decomposition(t1, t2)]
            if wall not in s.walls or not all(gk.wall_holds(t, wall) for t in products):
                bad.append((k1, k2, wall))
        return not bad, {"configurations": tried, "failures": len(bad)}
    return _timed(5, "wall propagation through tensor products", 30.0, body)


# ------------------------------------------------------- 6: SL2 minimum weight

def check_sl2_min_weight() -> CheckResult:
    def body():
        bad = []
        for k in range(4, 13, 2):
            for l in range(4, 13, 2):
                for d in range(4):
                    s1 = gk.canonical_sl2_support("phi_kd", k, d)
                    s2 = gk.canonical_sl2_support("phi_kd", l, 0)
                    s = gk.tensor_sl2(s1, s2)
                    if not (s.min_weight() == k - 2 * d + l == oracles.brute_tensor_min(s1, s2)
                            and gk.has_lowest_weight(s)):
                        bad.append((k, l, d, s.min_weight()))
        return not bad, {"failures": bad}
    return _timed(6, "SL2 tensor minimum weight k - 2d + l", 1.0, body)


# --------------------------------------------------------------- 7: h integral

def _random_posdef(rng: np.random.Generator) -> np.ndarray:
    A = rng.uniform(-0.6, 0.6, (2, 2))
    return A @ A.T + np.diag(rng.uniform(0.5, 1.5, 2))


def check_h_integral(seed: int = 17, n_samples: int = 10 ** 7) -> CheckResult:
    def body():
        rng = np.random.default_rng(seed)
        cases = [(np.eye(2), np.eye(2))] + [(_random_posdef(rng), _random_posdef(rng)) for _ in range(4)]
        mc_rel = []
        for i, (T, Y) in enumerate(cases):
            q, _ = h_integral_estimate(5, 1, T, Y)
            m, se = oracles.monte_carlo_h(5, 1, T, Y, n_samples=n_samples, seed=seed + i)
            mc_rel.append(abs(q - m) / abs(m))
        sc_rel = []
        for _ in range(4):
            T, Y = _random_posdef(rng), _random_posdef(rng)
            lam = 2.0
            lhs, _ = h_integral_estimate(5, 1, T, lam * Y)
            rhs, _ = h_integral_estimate(5, 1, lam * T, Y)
            sc_rel.append(abs(lhs - lam ** (3 - 2 * 5 - 2 * 1) * rhs) / abs(lhs))
        ok = max(mc_rel) <= 1e-3 and max(sc_rel) <= 1e-6
        return ok, {"monte_carlo_rel": mc_rel, "scaling_rel": sc_rel}
    return _timed(7, "h integral vs Monte Carlo and scaling identity", 60.0, body)


# ------------------------------------------------------------ 8: Omega oracle

OMEGA_POINTS = (np.diag([1j, 1j]), np.diag([1j, 2j]), np.array([[1j, 0.3], [0.3, 1j]]))


def check_omega(k: int = 4) -> CheckResult:
    def body():
        T = np.eye(2)

        def G(Z: SiegelPoint) -> complex:
            return Z.Y.det ** (k - 0.5) * psi(k, T, Z)

        rel = []
        for Zc in OMEGA_POINTS:
            Z = SiegelPoint.from_complex(Zc)
            out = apply_omega(0.5, 0.5 - k, G, Z)
            rel.append(float(np.linalg.norm(out) / abs(G(Z))))
        return max(rel) <= 1e-3, {"rel_norm": rel, "tol": 1e-3}
    return _timed(8, "Omega annihilates det(Y)^{k-1/2} Psi_k", 120.0, body)


# ------------------------------------------------------------- 9: coset oracle

def check_cosets(sample_pairs: int = 3000, seed: int = 19) -> CheckResult:
    def body():
        detail, ok = {}, True
        for H in (1, 2):
            reps = enumerate_delta_cosets(H)
            expected = oracles.brute_force_pair_count(H)
            keys = {(r.C, r.D) for r in reps}
            symp = all(r.is_symplectic() for r in reps)
            rng = random.Random(seed + H)
            equiv_hits = 0
            for _ in range(sample_pairs):
                i, j = rng.randrange(len(reps)), rng.randrange(len(reps))
                if i != j and delta_equivalent(reps[i], reps[j]):
                    equiv_hits += 1
            detail[H] = {"count": len(reps), "oracle": expected, "distinct_bottom_rows": len(keys),
                         "all_symplectic": symp, "equivalent_sampled_pairs": equiv_hits}
            ok &= len(reps) == expected == len(keys) and symp and equiv_hits == 0
        return ok, detail
    return _timed(9, "Delta-coset enumeration vs exhaustive oracle", 60.0, body)


# ------------------------------------------------------------------ 10: KST

def check_kst() -> CheckResult:
    def body():
        r = kst_y0_search(3, KST_GRID)
        ok = r.y0 is not None and r.y0 <= 3 and r.margin > 0
        return ok, r.to_dict()
    return _timed(10, "KST certificate at height 3", 10.0, body)


# ----------------------------------------------------------- 11: nonvanishing

def check_nonvanishing(k: int = 4, height: int = 2) -> CheckResult:
    def body():
        y0 = kst_y0_search(height, KST_GRID).y0
        I = SymMat2.identity()
        scan = nonvanishing_scan(k, I, I, y0, list(range(8, 25, 2)), height)
        cn = [abs(r.c_nonzero) for r in scan.rows]
        decreasing = all(b < a for a, b in zip(cn, cn[1:]))
        c0_pos = all(r.c_zero.real > 0 for r in scan.rows)
        cross = scan.crossover is not None and scan.crossover <= 24
        detail = scan.to_dict()
        detail.update(c_nonzero_strictly_decreasing=decreasing, c_zero_positive=c0_pos,
                      crossover_ok=cross)
        return decreasing and c0_pos and cross, detail
    return _timed(11, "nonvanishing scan over l", 600.0, body)


# ------------------------------------------------------------ 12: depth probe

PROBE_POINTS = (np.diag([1.1j, 1.1j]), np.array([[0.1 + 1.2j, 0.3 + 0.2j], [0.3 + 0.2j, -0.2 + 0.9j]]))


def check_depth_probe(k: int = 4, l: int = 16, d_max: int = 4) -> CheckResult:
    def body():
        p = P2Params(k, l, SymMat2.identity(), SymMat2.identity(), 2)
        Zs = [SiegelPoint.from_complex(z) for z in PROBE_POINTS]
        series = lowering_depth_probe(p, Zs, d_max, "series")
        product = lowering_depth_probe(p, Zs, d_max, "product")
        mono = all(b < a for a, b in zip(series.ratios, series.ratios[1:]))
        above = all(r > 10 * f for r, f in zip(product.ratios, product.noise_floor))
        return mono and above, {"series": series.to_dict(), "product": product.to_dict(),
                                "series_monotone": mono, "product_above_10x_floor": above}
    return _timed(12, "depth-probe contrast, series vs bare product", 900.0, body)


CHECKS = {1: check_exact_identities, 2: check_numeric_operators, 3: check_spectral_pairing,
          4: check_clebsch_gordan, 5: check_wall_propagation, 6: check_sl2_min_weight,
          7: check_h_integral, 8: check_omega, 9: check_cosets, 10: check_kst,
          11: check_nonvanishing, 12: check_depth_probe}

QUICK = (1, 4, 5, 6)  # exact and combinatorial checks only


def run_checks(numbers=None) -> list[CheckResult]:
    numbers = sorted(CHECKS) if numbers is None else numbers
    return [CHECKS[n]() for n in numbers]
