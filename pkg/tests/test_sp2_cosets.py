import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from siegel_poincare import sp2_cosets as sc
from siegel_poincare.oracles import brute_force_pair_count, snf_is_coprime_symmetric
from siegel_poincare.sp2_cosets import SymplecticRep

I2 = np.eye(2, dtype=int)
Z2 = np.zeros((2, 2), dtype=int)
small = st.lists(st.integers(-3, 3), min_size=4, max_size=4).map(lambda v: np.array(v).reshape(2, 2))


def test_pair_predicate_examples():
    assert sc.is_coprime_symmetric_pair(Z2, I2)
    assert sc.is_coprime_symmetric_pair(I2, I2)
    assert not sc.is_coprime_symmetric_pair(2 * I2, 2 * I2)
    assert not sc.is_coprime_symmetric_pair(Z2, Z2)
    # C D^T not symmetric
    assert not sc.is_coprime_symmetric_pair(np.array([[1, 0], [0, 0]]), np.array([[0, 1], [1, 1]]))


@given(C=small, D=small)
def test_pair_predicate_matches_smith_form(C, D):
    assert sc.is_coprime_symmetric_pair(C, D) == snf_is_coprime_symmetric(C, D)


@given(C=small, D=small)
def test_completion_is_symplectic(C, D):
    if not sc.is_coprime_symmetric_pair(C, D):
        return
    M = sc.complete_pair(C, D)
    assert M.is_symplectic()
    assert np.array_equal(np.array(M.C), C) and np.array_equal(np.array(M.D), D)
    R = sc.canonical_rep(C, D)
    assert R.is_symplectic() and sc.delta_equivalent(M, R)


def test_count_matches_oracle_height_1():
    reps = sc.enumerate_delta_cosets(1)
    assert len(reps) == brute_force_pair_count(1) == 1440
    assert len({(r.C, r.D) for r in reps}) == len(reps)
    assert all(r.is_symplectic() for r in reps)


def test_height_2_count():
    # the 23072 figure comes from the Smith-form oracle in the acceptance suite
    assert len(sc.enumerate_delta_cosets(2)) == 23072


def test_c_zero_stratum():
    reps = [r for r in sc.enumerate_delta_cosets(1) if r.c_is_zero]
    gl2 = [A for A in itertools.product(range(-1, 2), repeat=4) if abs(A[0] * A[3] - A[1] * A[2]) == 1]
    assert len(reps) == len(gl2)
    y0 = 1.3
    for r in reps:
        A, D = np.array(r.A), np.array(r.D)
        assert np.array_equal(D, np.rint(np.linalg.inv(A).T)) and not np.array(r.B).any()
        Zp = A @ (1j * y0 * np.eye(2)) @ A.T
        assert np.linalg.det(Zp.imag) == pytest.approx(y0 ** 2)


def test_pairwise_inequivalent_height_1():
    reps = sc.enumerate_delta_cosets(1)
    rng = np.random.default_rng(0)
    for i, j in rng.integers(0, len(reps), size=(2000, 2)):
        assert (i == j) == sc.delta_equivalent(reps[i], reps[j])


def test_delta_equivalence_detects_translates():
    M = sc.enumerate_delta_cosets(1)[100]
    S = np.array([[2, -1], [-1, 3]])
    T = SymplecticRep.from_matrix(np.block([[I2, S], [Z2, I2]]))
    assert sc.delta_equivalent(M, T @ M)
    assert T.is_symplectic() and np.array_equal((T @ T.inverse()).matrix(), np.eye(4))


def test_deterministic_order():
    reps = sc.enumerate_delta_cosets(1)
    assert reps == sorted(reps, key=SymplecticRep.sort_key)
    assert max(r.height() for r in reps) == 1
    with pytest.raises(ValueError):
        sc.enumerate_delta_cosets(0)


def test_bottom_rows_agree_with_pairs():
    Cs, Ds = sc.bottom_rows(1)
    pairs = sc.coprime_symmetric_pairs(1)
    assert len(pairs) == len(Cs) == 1440
    assert all(np.array_equal(C, c) and np.array_equal(D, d) for (C, D), c, d in zip(pairs, Cs, Ds))
