"""Dense linear algebra over GF(q) on int64 arrays of element encodings."""

from __future__ import annotations

import numpy as np

from .exceptions import InvalidParameters
from .field import GF

_EXACT_FLOAT = 2**53


def as_matrix(M) -> np.ndarray:
    A = np.array(M, dtype=np.int64)
    if A.ndim == 1:
        A = A.reshape(1, -1)
    return A


def matmul(F: GF, A, B) -> np.ndarray:
    """Product of encoded matrices. Prime fields go through float64 BLAS in
    chunks small enough that every partial sum is exact."""
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    if A.shape[-1] != B.shape[0]:
        raise InvalidParameters(f"shape mismatch {A.shape} x {B.shape}")
    if F.prime:
        p = F.p
        kk = A.shape[-1]
        step = max(1, int((_EXACT_FLOAT - 1) // max(1, (p - 1) ** 2)))
        out = np.zeros(A.shape[:-1] + B.shape[1:], dtype=np.int64)
        for s in range(0, kk, step):
            part = A[..., s:s + step].astype(np.float64) @ B[s:s + step].astype(np.float64)
            out = (out + np.mod(part, p).astype(np.int64)) % p
        return out
    out = np.zeros(A.shape[:-1] + B.shape[1:], dtype=np.int64)
    for i in range(A.shape[-1]):
        out = F.vadd(out, F.vmul(A[..., i, None], B[i]))
    return out


def rref(F: GF, M):
    """Reduced row echelon form. Returns ``(R, pivots)``; R keeps the zero rows."""
    R = as_matrix(M).copy()
    rows, cols = R.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(R[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            R[[r, piv]] = R[[piv, r]]
        inv = F.inv(int(R[r, c]))
        if F.prime:
            R[r] = R[r] * inv % F.p
            col = R[:, c].copy()
            col[r] = 0
            nzr = np.nonzero(col)[0]
            if nzr.size:
                R[nzr] = (R[nzr] - np.outer(col[nzr], R[r])) % F.p
        else:
            R[r] = F.vmul(R[r], inv)
            col = R[:, c].copy()
            col[r] = 0
            nzr = np.nonzero(col)[0]
            if nzr.size:
                R[nzr] = F.vsub(R[nzr], F.vmul(col[nzr, None], R[r][None, :]))
        pivots.append(c)
        r += 1
    return R, pivots


def rank(F: GF, M) -> int:
    A = as_matrix(M)
    if A.size == 0:
        return 0
    # eliminate along the shorter side
    if A.shape[0] > A.shape[1]:
        A = A.T
    return len(rref(F, A)[1])


def row_basis(F: GF, M) -> np.ndarray:
    R, piv = rref(F, M)
    return R[: len(piv)]


def nullspace(F: GF, M) -> np.ndarray:
    """Basis (as rows) of {x : M x = 0}."""
    A = as_matrix(M)
    R, piv = rref(F, A)
    cols = A.shape[1]
    free = [c for c in range(cols) if c not in piv]
    out = np.zeros((len(free), cols), dtype=np.int64)
    for t, fc in enumerate(free):
        out[t, fc] = 1
        for i, pc in enumerate(piv):
            out[t, pc] = F.neg(int(R[i, fc]))
    return out


def solve(F: GF, A, B):
    """A solution X of ``A @ X = B`` or None if inconsistent.

    ``B`` may be a vector or a matrix of right-hand sides.
    """
    A = as_matrix(A)
    B = np.asarray(B, dtype=np.int64)
    vec = B.ndim == 1
    if vec:
        B = B.reshape(-1, 1)
    aug = np.concatenate([A, B], axis=1)
    R, piv = rref(F, aug)
    ncols = A.shape[1]
    if any(c >= ncols for c in piv):
        return None
    X = np.zeros((ncols, B.shape[1]), dtype=np.int64)
    for i, c in enumerate(piv):
        X[c] = R[i, ncols:]
    return X[:, 0] if vec else X


def inverse(F: GF, A) -> np.ndarray:
    A = as_matrix(A)
    n = A.shape[0]
    X = solve(F, A, np.eye(n, dtype=np.int64))
    if X is None or rank(F, A) < n:
        raise InvalidParameters("matrix is singular")
    return X
