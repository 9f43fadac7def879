import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from siegel_poincare import siegel_kernel as sk
from siegel_poincare.config import QuadratureSpec
from siegel_poincare.oracles import monte_carlo_h
from siegel_poincare.siegel_kernel import SiegelPoint, SymMat2
from siegel_poincare.sp2_cosets import enumerate_delta_cosets

I2 = np.eye(2)
Z0 = SiegelPoint.from_complex(np.array([[0.2 + 1.1j, 0.1 + 0.3j], [0.1 + 0.3j, -0.3 + 0.9j]]))


def test_symmat_and_point():
    S = SymMat2(2, 0.5, 3)
    assert S.det == pytest.approx(5.75) and S.trace == 5 and S.positive_definite()
    assert SymMat2(1, 0.5, 2).half_integral() and not SymMat2(1, 0.25, 2).half_integral()
    with pytest.raises(ValueError):
        SymMat2.from_array([[1, 2], [3, 4]])
    with pytest.raises(ValueError):
        SiegelPoint(SymMat2(0, 0, 0), SymMat2(1, 2, 1))
    assert np.allclose(SiegelPoint.from_coords(Z0.coords()).Z, Z0.Z)
    assert np.allclose(SiegelPoint.scalar(1.5).Z, 1.5j * I2)


def _det_y(Z):
    return Z.Y.det


def test_slash_identity_and_gl2_block():
    M = np.eye(4)
    F = lambda Z: complex(np.trace(Z.Z @ Z.Z))
    assert sk.slash(F, 6, M, Z0) == pytest.approx(F(Z0))
    A = np.diag([1.0, -1.0])
    M = np.block([[A, np.zeros((2, 2))], [np.zeros((2, 2)), np.linalg.inv(A).T]])
    assert sk.slash(_det_y, 4, M, Z0) == pytest.approx(Z0.Y.det, rel=1e-14)


def test_slash_general_beta_zero():
    F = lambda Z: complex(np.exp(1j * np.trace(Z.Z)))
    for M in enumerate_delta_cosets(1)[:20]:
        assert sk.slash_general(F, 5, 0, M, Z0) == pytest.approx(sk.slash(F, 5, M, Z0), rel=1e-12)
    with pytest.raises(ValueError):
        sk.slash_general(F, 1.5, 1, np.eye(4), Z0)


def test_slash_cocycle():
    F = lambda Z: complex(np.exp(0.3j * np.trace(Z.Z)) * Z.Y.det)
    reps = enumerate_delta_cosets(2)
    rng = np.random.default_rng(3)
    for _ in range(25):
        M1, M2 = (reps[i].matrix() for i in rng.choice(len(reps), 2))
        # right action: (F | M1) | M2 = F | (M1 M2)
        lhs = sk.slash(F, 4, M1 @ M2, Z0)
        rhs = sk.slash(lambda W: sk.slash(F, 4, M1, W), 4, M2, Z0)
        assert lhs == pytest.approx(rhs, rel=1e-10)


def test_sqrtm_sym():
    T = np.array([[2.0, 0.5], [0.5, 1.0]])
    R = sk.sqrtm_sym(T)
    assert np.allclose(R @ R, T) and np.allclose(R, R.T)
    with pytest.raises(ValueError):
        sk.sqrtm_sym(np.diag([1.0, -1.0]))


def test_h_against_monte_carlo():
    T = np.array([[1.0, 0.25], [0.25, 0.8]])
    Y = np.array([[1.2, -0.1], [-0.1, 0.7]])
    v = sk.h_integral(5, 1, T, Y)
    mc, se = monte_carlo_h(5, 1, T, Y, n_samples=10 ** 6, seed=5)
    assert abs(v - mc) < 5 * se + 1e-3 * abs(v)


def test_h_scaling_identity():
    rng = np.random.default_rng(1)
    for _ in range(3):
        A, B = rng.normal(size=(2, 2, 2))
        T, Y = A @ A.T + 0.5 * I2, B @ B.T + 0.5 * I2
        alpha, beta, lam = 4.0 + rng.random(), 1.0 + rng.random(), 2.0
        lhs = sk.h_integral(alpha, beta, T, lam * Y)
        rhs = lam ** (3 - 2 * alpha - 2 * beta) * sk.h_integral(alpha, beta, lam * T, Y)
        assert lhs == pytest.approx(rhs, rel=1e-6)


@pytest.mark.parametrize("Y", [I2, np.array([[1.5, 0.4], [0.4, 0.6]])])
def test_h_decreasing_in_loewner_order(Y):
    assert sk.h_integral(5, 1, I2, Y + 0.1 * I2) < sk.h_integral(5, 1, I2, Y)


def test_h_domain():
    with pytest.raises(ValueError):
        sk.h_integral(0.5, 1, I2, I2)
    with pytest.raises(ValueError):
        sk.h_integral(5, 0.4, I2, I2)


def test_h_batch_shapes_and_error():
    r = sk.h_batch(5, 1, I2, [I2, 2 * I2, np.diag([0.5, 1.5])])
    assert r.value.shape == (3, 1) and np.all(r.error <= 1e-9 * np.abs(r.value))
    v, err = sk.h_integral_estimate(5, 1, I2, I2)
    assert v == pytest.approx(r.value[0, 0], rel=1e-10) and err >= 0


def test_phi_values():
    assert sk.phi(10, I2, SiegelPoint.scalar(1.0)) == pytest.approx(math.exp(-4 * math.pi), rel=1e-14)


def test_psi_real_positive_at_x_zero():
    v = sk.psi(4, I2, SiegelPoint.from_complex(1j * np.array([[1.0, 0.2], [0.2, 0.8]])))
    assert v.imag == 0 and v.real > 0
    with pytest.raises(ValueError):
        sk.psi(3, I2, Z0)
    with pytest.raises(ValueError):
        sk.psi(4, np.diag([1.0, -1.0]), Z0)


def test_psi_equivariance():
    U = np.array([[1.0, 1.0], [0.0, 1.0]])
    T = np.array([[1.0, 0.5], [0.5, 1.0]])
    lhs = sk.psi(4, U.T @ T @ U, Z0)
    rhs = sk.psi(4, T, SiegelPoint.from_complex(U @ Z0.Z @ U.T))
    assert lhs == pytest.approx(rhs, rel=1e-9)


def test_psi_batch_matches_scalar():
    Zs = np.array([Z0.Z, 1.3j * I2])
    out = sk.psi_batch(4, I2, Zs)
    assert out[0] == pytest.approx(sk.psi(4, I2, Z0), rel=1e-12)


def test_lowering_of_holomorphic_phi_vanishes():
    T = np.array([[1.0, 0.5], [0.5, 2.0]])
    L = sk.apply_lowering(lambda Z: sk.phi(10, T, Z), Z0)
    assert np.max(np.abs(L)) < 1e-8


def test_lowering_of_det_power():
    # L det(Y)^s = (i s / 2) det(Y)^s Y, hence tr(Y^{-1} L det(Y)^s) = i s det(Y)^s
    s = 1.7
    F = lambda Z: Z.Y.det ** s
    L = sk.apply_lowering(F, Z0)
    Y = Z0.Y.as_array()
    assert np.allclose(L, 0.5j * s * F(Z0) * Y, rtol=1e-6, atol=1e-9)
    assert np.trace(np.linalg.inv(Y) @ L) == pytest.approx(1j * s * F(Z0), rel=1e-6)


def test_omega_annihilates_weighted_psi():
    k = 4
    G = lambda Z: Z.Y.det ** (k - 0.5) * sk.psi(k, I2, Z)
    Z = SiegelPoint.scalar(1.0)
    out = sk.apply_omega(0.5, 0.5 - k, G, Z)
    assert np.max(np.abs(out)) <= 1e-3 * abs(G(Z))


@pytest.mark.parametrize("which", [-1, -7])
def test_omega_equivariance(which):
    # Omega(F | M)(Z) = (CZ+D)^T (Omega F)(M.Z) (CZ+D)^{-T} times the scalar slash factor
    alpha, beta = 2.0, -1.0
    F = lambda Z: complex(np.exp(0.7j * np.trace(Z.Z)) * Z.Y.det ** 0.5)
    M = enumerate_delta_cosets(2)[which].matrix()
    C, D = M[2:, :2], M[2:, 2:]
    lhs = sk.apply_omega(alpha, beta, lambda W: sk.slash_general(F, alpha, beta, M, W), Z0)
    OF = sk.apply_omega(alpha, beta, F, sk.act_point(M, Z0))
    J = C @ Z0.Z + D
    j = np.linalg.det(J)
    rhs = j ** (-(alpha - beta)) * abs(j) ** (-2 * beta) * J.T @ OF @ np.linalg.inv(J.T)
    assert np.max(np.abs(lhs - rhs)) <= 1e-4 * np.max(np.abs(lhs))


def test_lowered_psi_matches_finite_differences():
    k, T = 4, np.array([[1.0, 0.5], [0.5, 1.0]])
    fd = sk.apply_lowering(lambda Z: sk.psi(k, T, Z), Z0)
    tower = sk.lowered_psi(k, T, [Z0.Z], 1)[0]
    assert np.allclose(tower, fd, rtol=1e-5, atol=1e-7 * np.max(np.abs(fd)))
    assert sk.lowered_psi(k, T, [Z0.Z], 0)[0] == pytest.approx(sk.psi(k, T, Z0), rel=1e-12)


def test_multi_indices():
    assert sk.multi_indices(0) == [(0, 0, 0)]
    assert len(sk.multi_indices(3)) == 20


def test_shimura_fit_bounds_grid():
    fit = sk.shimura_fit(4, y_grid=np.geomspace(0.1, 3.0, 5))
    assert fit.b > 0 and fit.C > 0
    grid = fit.y_grid
    pts = [(a, c) for a in grid for c in grid]
    for (a, c), r in zip(pts, fit.ratios):
        assert r <= fit.C * (1 + (a * c) ** (-fit.b)) * (1 + 1e-12)
