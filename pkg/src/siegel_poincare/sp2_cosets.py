"""Coset representatives for Delta \\ Sp2(Z), Delta = {(I B; 0 I) : B = B^T integral}.

Two symplectic matrices lie in the same Delta-coset iff they share the bottom
block row (C, D), so cosets correspond to coprime symmetric pairs: C D^T
symmetric and (C D) primitive.  Each pair is completed to a symplectic matrix
and its top row reduced to a canonical representative.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import gcd

import numpy as np
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_decomp

J4 = np.array([[0, 0, -1, 0], [0, 0, 0, -1], [1, 0, 0, 0], [0, 1, 0, 0]], dtype=np.int64)

Mat2 = tuple[tuple[int, int], tuple[int, int]]


def _t(M) -> Mat2:
    M = np.asarray(M, dtype=np.int64)
    return ((int(M[0, 0]), int(M[0, 1])), (int(M[1, 0]), int(M[1, 1])))


@dataclass(frozen=True)
class SymplecticRep:
    A: Mat2
    B: Mat2
    C: Mat2
    D: Mat2

    @classmethod
    def from_matrix(cls, M) -> "SymplecticRep":
        M = np.asarray(M, dtype=np.int64)
        return cls(_t(M[:2, :2]), _t(M[:2, 2:]), _t(M[2:, :2]), _t(M[2:, 2:]))

    def matrix(self) -> np.ndarray:
        return np.block([[np.array(self.A), np.array(self.B)],
                         [np.array(self.C), np.array(self.D)]]).astype(np.int64)

    def is_symplectic(self) -> bool:
        M = self.matrix()
        return bool(np.array_equal(M @ J4 @ M.T, J4))

    def inverse(self) -> "SymplecticRep":
        # M^{-1} = -J M^T J
        return SymplecticRep.from_matrix(-J4 @ self.matrix().T @ J4)

    def __matmul__(self, other: "SymplecticRep") -> "SymplecticRep":
        return SymplecticRep.from_matrix(self.matrix() @ other.matrix())

    @property
    def c_is_zero(self) -> bool:
        return not any(self.C[0]) and not any(self.C[1])

    def height(self) -> int:
        return int(np.abs(np.hstack([np.array(self.C), np.array(self.D)])).max())

    def sort_key(self) -> tuple:
        return (sum(self.C, ()), sum(self.D, ()), sum(self.A, ()))

    def to_list(self) -> list:
        return self.matrix().tolist()


def _minors_gcd(N: np.ndarray) -> int:
    g = 0
    for i, j in itertools.combinations(range(N.shape[1]), 2):
        g = gcd(g, int(N[0, i] * N[1, j] - N[0, j] * N[1, i]))
    return g


def is_coprime_symmetric_pair(C, D) -> bool:
    """C D^T symmetric and both elementary divisors of (C D) equal to 1."""
    C, D = np.asarray(C, dtype=np.int64), np.asarray(D, dtype=np.int64)
    CDt = C @ D.T
    if CDt[0, 1] != CDt[1, 0]:
        return False
    N = np.hstack([C, D])
    if not N.any():
        return False
    S, _, _ = smith_normal_decomp(Matrix(N.tolist()), domain=ZZ)
    return abs(S[0, 0]) == 1 and abs(S[1, 1]) == 1


def _column_hermite_complement(N: np.ndarray) -> np.ndarray:
    """Rows X with [X; N] unimodular, for a primitive 2x4 integer N.

    Column operations V bring N to (H 0) with H lower triangular; then
    X = (0 I) V^{-1}.  Only V^{-1} is tracked (row operations mirror the
    column operations).
    """
    N = [list(map(int, r)) for r in N]
    Vinv = [[int(i == j) for j in range(4)] for i in range(4)]

    def col_sub(i, j, t):  # col_j -= t col_i
        for r in N:
            r[j] -= t * r[i]
        Vinv[i] = [a + t * b for a, b in zip(Vinv[i], Vinv[j])]

    def col_swap(i, j):
        for r in N:
            r[i], r[j] = r[j], r[i]
        Vinv[i], Vinv[j] = Vinv[j], Vinv[i]

    for row in range(2):
        while True:
            nz = [j for j in range(row, 4) if N[row][j] != 0]
            if not nz:
                raise ValueError("(C D) is not primitive")
            p = min(nz, key=lambda j: abs(N[row][j]))
            if p != row:
                col_swap(row, p)
            for j in range(row + 1, 4):
                col_sub(row, j, N[row][j] // N[row][row])
            if all(N[row][j] == 0 for j in range(row + 1, 4)):
                break
    if abs(N[0][0] * N[1][1]) != 1:
        raise ValueError("(C D) is not primitive")
    return np.array(Vinv[2:], dtype=np.int64)


def _inv2(P: np.ndarray) -> np.ndarray:
    det = int(P[0, 0] * P[1, 1] - P[0, 1] * P[1, 0])
    if abs(det) != 1:
        raise ArithmeticError("matrix is not unimodular")
    return det * np.array([[P[1, 1], -P[0, 1]], [-P[1, 0], P[0, 0]]], dtype=np.int64)


def complete_pair(C, D) -> SymplecticRep:
    """A symplectic matrix with bottom block row (C, D)."""
    C, D = np.asarray(C, dtype=np.int64), np.asarray(D, dtype=np.int64)
    N = np.hstack([C, D])
    X = _column_hermite_complement(N)
    P = X @ J4 @ N.T
    X1 = -_inv2(P) @ X  # now X1 J N^T = -I
    q = int((X1 @ J4 @ X1.T)[0, 1])
    X2 = X1 + np.array([[0, -q], [0, 0]]) @ N
    M = SymplecticRep.from_matrix(np.vstack([X2, N]))
    if not M.is_symplectic():
        raise ArithmeticError("completion failed")
    return M


def _reduce_top(M: SymplecticRep) -> SymplecticRep:
    """Canonical representative of {(A + SC, B + SD) : S symmetric integral}."""
    C = np.array(M.C, dtype=np.int64)
    D = np.array(M.D, dtype=np.int64)
    # lattice {SC} in Z^4 (A flattened), generated by E11 C, (E12 + E21) C, E22 C;
    # coefficient columns track S = [[s0, s1], [s1, s2]]
    rows = [np.concatenate([np.array([C[0, 0], C[0, 1], 0, 0]), [1, 0, 0]]),
            np.concatenate([np.array([C[1, 0], C[1, 1], C[0, 0], C[0, 1]]), [0, 1, 0]]),
            np.concatenate([np.array([0, 0, C[1, 0], C[1, 1]]), [0, 0, 1]])]
    rows = [r.astype(object) for r in rows]
    basis = []
    for col in range(4):
        live = [r for r in rows if r[col] != 0]
        rest = [r for r in rows if r[col] == 0]
        while len(live) > 1:
            live.sort(key=lambda r: abs(r[col]))
            piv = live[0]
            nxt = [piv]
            for r in live[1:]:
                r = r - (r[col] // piv[col]) * piv
                if r[col] != 0:
                    nxt.append(r)
                else:
                    rest.append(r)
            live = nxt
        if live:
            piv = live[0] if live[0][col] > 0 else -live[0]
            basis.append((col, piv))
        rows = rest
    a = np.array(M.A, dtype=np.int64).reshape(4).astype(object)
    s = np.zeros(3, dtype=object)
    for col, piv in basis:
        t = a[col] // piv[col]
        a = a - t * piv[:4]
        s = s - t * piv[4:]
    Smat = np.array([[s[0], s[1]], [s[1], s[2]]], dtype=np.int64)
    A2 = np.array(M.A, dtype=np.int64) + Smat @ C
    B2 = np.array(M.B, dtype=np.int64) + Smat @ D
    assert np.array_equal(A2.reshape(4), a.astype(np.int64))
    return SymplecticRep(_t(A2), _t(B2), M.C, M.D)


def canonical_rep(C, D) -> SymplecticRep:
    return _reduce_top(complete_pair(C, D))


@lru_cache(maxsize=8)
def _pair_arrays(height: int) -> tuple[np.ndarray, np.ndarray]:
    r = np.arange(-height, height + 1)
    mats = np.array(list(itertools.product(r, repeat=4)), dtype=np.int64).reshape(-1, 2, 2)
    Cs, Ds = [], []
    for C in mats:
        CDt = np.einsum("ij,nkj->nik", C, mats)
        D = mats[CDt[:, 0, 1] == CDt[:, 1, 0]]
        N = np.concatenate([np.broadcast_to(C, D.shape), D], axis=2)
        g = np.zeros(len(D), dtype=np.int64)
        for i, j in itertools.combinations(range(4), 2):
            g = np.gcd(g, N[:, 0, i] * N[:, 1, j] - N[:, 0, j] * N[:, 1, i])
        D = D[g == 1]
        Cs.append(np.broadcast_to(C, D.shape))
        Ds.append(D)
    return np.concatenate(Cs), np.concatenate(Ds)


def coprime_symmetric_pairs(height: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """All (C, D) with entries in [-height, height] forming a coprime symmetric pair."""
    Cs, Ds = _pair_arrays(int(height))
    return [(C.copy(), D.copy()) for C, D in zip(Cs, Ds)]


def bottom_rows(height: int) -> tuple[np.ndarray, np.ndarray]:
    """The same pairs as two stacked integer arrays of shape (n, 2, 2)."""
    Cs, Ds = _pair_arrays(int(height))
    return Cs.copy(), Ds.copy()


@lru_cache(maxsize=8)
def _delta_cosets(height: int) -> tuple[SymplecticRep, ...]:
    reps = []
    for C, D in coprime_symmetric_pairs(height):
        if not C.any():
            # C = 0 forces D = A^{-T} with A in GL2(Z); take B = 0
            A = np.rint(np.linalg.inv(D).T).astype(np.int64)
            reps.append(SymplecticRep(_t(A), ((0, 0), (0, 0)), _t(C), _t(D)))
        else:
            reps.append(canonical_rep(C, D))
    return tuple(sorted(reps, key=SymplecticRep.sort_key))


def enumerate_delta_cosets(height: int) -> list[SymplecticRep]:
    """One representative per Delta-coset with (C, D) entries bounded by height."""
    if height < 1:
        raise ValueError("height must be >= 1")
    return list(_delta_cosets(int(height)))


def delta_equivalent(M1: SymplecticRep, M2: SymplecticRep) -> bool:
    """M2 M1^{-1} in Delta."""
    G = (M2 @ M1.inverse()).matrix()
    I2 = np.eye(2, dtype=np.int64)
    return (np.array_equal(G[:2, :2], I2) and np.array_equal(G[2:, 2:], I2)
            and not G[2:, :2].any() and G[0, 3] == G[1, 2])
