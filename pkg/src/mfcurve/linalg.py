"""Dense exact linear algebra mod p on int64 numpy arrays.

Row operations defer the mod: with p < 2^15 and pivot rows reduced to
[0, p), an eliminated entry grows by at most p^2 per update, so thousands
of updates fit in int64 before reduction is forced.
"""

from __future__ import annotations

import numpy as np


def as_matrix(rows, ncols) -> np.ndarray:
    if len(rows) == 0:
        return np.zeros((0, ncols), dtype=np.int64)
    return np.array(rows, dtype=np.int64)


def rref_modp(A: np.ndarray, p: int):
    """Reduced row echelon form.  Returns (R, pivot column list)."""
    A = np.array(A, dtype=np.int64, order="C") % p
    m, n = A.shape
    pivots = []
    r = 0
    for c in range(n):
        if r == m:
            break
        col = A[r:, c] % p
        nz = np.nonzero(col)[0]
        if nz.size == 0:
            A[r:, c] = col
            continue
        i = r + nz[0]
        if i != r:
            A[[r, i]] = A[[i, r]]
        A[r] %= p
        inv = pow(int(A[r, c]), -1, p)
        A[r] = A[r] * inv % p
        rows = np.nonzero(A[:, c] % p)[0]
        rows = rows[rows != r]
        if rows.size:
            A[rows] -= np.outer(A[rows, c] % p, A[r])
        pivots.append(c)
        r += 1
    A %= p
    return A, pivots


def rank_modp(A: np.ndarray, p: int) -> int:
    if A.size == 0:
        return 0
    _, piv = rref_modp(A, p)
    return len(piv)


def nullspace_modp(A: np.ndarray, p: int) -> np.ndarray:
    """Rows span the right kernel of A."""
    m, n = A.shape
    if n == 0:
        return np.zeros((0, 0), dtype=np.int64)
    if m == 0:
        return np.eye(n, dtype=np.int64)
    R, piv = rref_modp(A, p)
    free = [c for c in range(n) if c not in piv]
    basis = np.zeros((len(free), n), dtype=np.int64)
    for bi, c in enumerate(free):
        basis[bi, c] = 1
        for ri, pc in enumerate(piv):
            basis[bi, pc] = (-int(R[ri, c])) % p
    return basis


def row_space_basis(A: np.ndarray, p: int) -> np.ndarray:
    R, piv = rref_modp(A, p)
    return R[: len(piv)]


def solve_modp(A: np.ndarray, b: np.ndarray, p: int):
    """One solution of A x = b, or None."""
    m, n = A.shape
    aug = np.concatenate([A % p, (b % p).reshape(m, 1)], axis=1)
    R, piv = rref_modp(aug, p)
    if n in piv:
        return None
    x = np.zeros(n, dtype=np.int64)
    for ri, c in enumerate(piv):
        x[c] = R[ri, n]
    return x


def in_row_space(basis_rref: np.ndarray, piv, v: np.ndarray, p: int) -> bool:
    """Membership test against a precomputed RREF basis."""
    v = v % p
    for ri, c in enumerate(piv):
        if v[c]:
            v = (v - v[c] * basis_rref[ri]) % p
    return not v.any()


def conv2_modp(A: np.ndarray, B: np.ndarray, p: int) -> np.ndarray:
    """Exact 2-D convolution mod p (dense bivariate coefficient grids)."""
    a0, a1 = A.shape
    b0, b1 = B.shape
    out = np.zeros((a0 + b0 - 1, a1 + b1 - 1), dtype=np.int64)
    nz = np.argwhere(B)
    for i, j in nz:
        out[i : i + a0, j : j + a1] += int(B[i, j]) * A
        if out.max() > (1 << 61):
            out %= p
    return out % p
