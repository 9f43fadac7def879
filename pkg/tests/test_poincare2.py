import math

import numpy as np
import pytest

from siegel_poincare import poincare2 as p2
from siegel_poincare import siegel_kernel as sk
from siegel_poincare.poincare2 import P2Params
from siegel_poincare.siegel_kernel import SiegelPoint, SymMat2
from siegel_poincare.sp2_cosets import SymplecticRep, enumerate_delta_cosets

I = SymMat2.identity()
IDENTITY = SymplecticRep(((1, 0), (0, 1)), ((0, 0), (0, 0)), ((0, 0), (0, 0)), ((1, 0), (0, 1)))
Z1 = SiegelPoint.from_complex(np.array([[0.1 + 1.2j, 0.3 + 0.2j], [0.3 + 0.2j, -0.2 + 0.9j]]))


@pytest.fixture(scope="module")
def fit():
    return sk.shimura_fit(4)


def test_params_validation():
    with pytest.raises(ValueError):
        P2Params(3, 10)
    with pytest.raises(ValueError):
        P2Params(4, 0)
    with pytest.raises(ValueError):
        P2Params(4, 10, T=SymMat2(1, 0.3, 1))
    with pytest.raises(ValueError):
        P2Params(4, 10, T_prime=SymMat2(1, 0, -1))
    p = P2Params(4, 10)
    assert p.weight == 14 and p.advisory(5.0) and not p.advisory(1.0)


def test_identity_coset(fit):
    p = P2Params(4, 12, T=SymMat2(1, 0.5, 2))
    r = p2.eval_p2(p, Z1, reps=[IDENTITY], fit=fit)
    expect = sk.psi(4, p.T, Z1) * sk.phi(12, p.T_prime, Z1)
    assert r.total == pytest.approx(expect, rel=1e-12)
    assert r.c_nonzero == 0


def test_stratum_split_and_c_zero_positive(fit):
    p = P2Params(4, 20, height=1)
    r = p2.eval_p2(p, SiegelPoint.scalar(1.1), fit=fit)
    assert r.total == r.c_zero + r.c_nonzero
    assert abs(r.c_zero.imag) <= 1e-14 * abs(r.c_zero) and r.c_zero.real > 0
    assert r.n_cosets == 1440 and not r.advisory


def test_majorant_dominates_every_summand(fit):
    p = P2Params(4, 16, height=1)
    for Z in (SiegelPoint.scalar(1.1), Z1):
        terms, _, g = p2.summands(p, Z)
        assert np.all(np.abs(terms) <= p2.majorant_terms(p, g, fit))


def test_height_increment_within_tail(fit):
    p1, p2_ = P2Params(4, 20, height=1), P2Params(4, 20, height=2)
    Z = SiegelPoint.scalar(1.1)
    r1, r2 = p2.eval_p2(p1, Z, fit=fit), p2.eval_p2(p2_, Z, fit=fit)
    assert abs(r2.total - r1.total) <= r1.tail
    assert r2.tail < r1.tail


def test_c_zero_first_principles(fit):
    # C = 0: M.Z = A Z A^T and det(CZ + D) = det(A)^{-1}, so each coset contributes
    # det(A)^{k+l} det(T Y') h(T; Y') e^{-2 pi tr(T' Y')} with Y' = y0 A A^T
    y0, T = 1.1, SymMat2(1, 0.5, 1)
    p = P2Params(4, 20, T=T, height=1)
    r = p2.eval_p2(p, SiegelPoint.scalar(y0), fit=fit)
    total = []
    for rep in enumerate_delta_cosets(1):
        if not rep.c_is_zero:
            continue
        A = np.array(rep.A, float)
        Yp = y0 * A @ A.T
        total.append(round(np.linalg.det(A)) ** p.weight * T.det * np.linalg.det(Yp)
                     * sk.h_integral(5, 1, T.as_array(), Yp) * math.exp(-2 * math.pi * np.trace(Yp)))
    assert r.c_zero.real == pytest.approx(math.fsum(total), rel=1e-10)


def test_printed_c_zero_form_differs(fit):
    # the printed closed form reuses h(T; y0 I) and repeats its exponential factor;
    # it is kept for comparison and disagrees by orders of magnitude
    p = P2Params(4, 20, height=1)
    r = p2.eval_p2(p, SiegelPoint.scalar(1.1), fit=fit)
    assert r.c_zero.real / p2.c_zero_display(p, 1.1) > 1e3


def test_kst_examples():
    r = p2.kst_y0_search(1, [1.05, 1.5])
    assert r.y0 is not None and r.margin > 0
    # C = I, D = 0 gives |det| = y0^2
    assert abs(np.linalg.det(np.eye(2) * 1j * 1.5)) == pytest.approx(2.25)
    res = p2.kst_y0_search(3, [1.1, 1.5, 2.0, 3.0])
    assert res.y0 == 1.1 and res.margin == pytest.approx(0.1, abs=1e-12)
    assert len(res.min_abs_det) == 4 and list(res.min_abs_det) == sorted(res.min_abs_det)


def test_kst_failure_reports_matrix():
    r = p2.kst_y0_search(2, [1.0])
    assert r.y0 is None and r.worst is not None
    W = np.array(r.worst)
    C, D = W[2:, :2], W[2:, 2:]
    assert C.any() and abs(np.linalg.det(1j * C + D)) <= 1 + 1e-12


def test_exact_det_matches_float():
    from fractions import Fraction
    from siegel_poincare.sp2_cosets import bottom_rows
    Cs, Ds = bottom_rows(1)
    y = Fraction(11, 10)
    exact = p2._abs_det_sq(Cs, Ds, y) / 10 ** 4
    direct = np.abs(np.linalg.det(1.1j * Cs + Ds)) ** 2
    assert np.allclose(exact, direct, rtol=1e-12, atol=1e-12)


def test_scan_structure(fit):
    scan = p2.nonvanishing_scan(4, I, I, 1.5, [8, 12, 20], height=1, fit=fit)
    assert [r.l for r in scan.rows] == [8, 12, 20]
    c0 = [r.c_zero.real for r in scan.rows]
    assert all(c > 0 for c in c0)
    for r in scan.rows:
        full = p2.eval_p2(P2Params(4, r.l, height=1), SiegelPoint.scalar(1.5), fit=fit)
        assert r.total == pytest.approx(full.total, rel=1e-12)
    d = scan.to_dict()
    assert d["assumption"] == "GRC-conditional" and len(d["rows"]) == 3


def test_scan_total_positive_at_l20():
    scan = p2.nonvanishing_scan(4, I, I, 1.1, [20], height=2)
    assert scan.rows[0].total.real > 0


def test_transport_single_slot():
    rng = np.random.default_rng(0)
    J = rng.normal(size=(3, 2, 2)) + 1j * rng.normal(size=(3, 2, 2))
    G = rng.normal(size=(3, 2, 2))
    out = p2._transport(G, J, 1)
    for i in range(3):
        assert np.allclose(out[i], J[i].T @ G[i] @ J[i])


def test_probe_product_is_not_annihilated(fit):
    p = P2Params(4, 16)
    r = p2.lowering_depth_probe(p, [Z1], d_max=2, target="product", fit=fit)
    assert r.annihilation_depth is None
    assert all(x > 10 * f for x, f in zip(r.ratios, r.noise_floor))
    assert r.to_dict()["assumption"] == "GRC-conditional"


def test_probe_first_level_matches_finite_differences(fit):
    # the structured d = 1 ratio for the bare product equals ||L(Psi Phi)|| / |Psi Phi| by differences
    p = P2Params(4, 16, T=SymMat2(1, 0.5, 1))
    r = p2.lowering_depth_probe(p, [Z1], d_max=1, target="product", fit=fit)
    F = lambda Z: sk.psi(4, p.T, Z) * sk.phi(16, p.T_prime, Z)
    L = sk.apply_lowering(F, Z1)
    assert r.ratios[0] == pytest.approx(np.linalg.norm(L) / abs(F(Z1)), rel=1e-5)


def test_leibniz_split():
    T = SymMat2(1, 0.5, 1).as_array()
    Ps = lambda Z: sk.psi(4, T, Z)
    Ph = lambda Z: sk.phi(16, np.eye(2), Z)
    L_prod = sk.apply_lowering(lambda Z: Ps(Z) * Ph(Z), Z1)
    assert np.allclose(L_prod, sk.apply_lowering(Ps, Z1) * Ph(Z1), rtol=1e-6)


def test_probe_holomorphic_and_domain():
    r = p2.lowering_depth_probe(P2Params(4, 16), [Z1], d_max=2, target="holomorphic")
    assert r.annihilation_depth == 1 and r.ratios == (0.0, 0.0)
    with pytest.raises(ValueError):
        p2.lowering_depth_probe(P2Params(4, 16), [Z1], d_max=0)
    with pytest.raises(ValueError):
        p2.lowering_depth_probe(P2Params(4, 16), [Z1], target="other")


def test_tail_model_pieces():
    assert p2._tail_factor(2, 1.0) == math.inf
    assert p2._tail_factor(2, 13) == pytest.approx(sum((h / 2) ** -13 for h in range(3, 5000)), rel=1e-9)
    assert p2._shell_exponent({1: 1.0, 2: 2.0 ** -10}, 13.0) == pytest.approx(10.0)
    assert p2._shell_exponent({1: 1.0}, 13.0) == 13.0
