"""Vectorized numpy implementations of the hot loops.

Every function here has a twin with the same name and signature in
``_numba``; the two are required to agree to rounding error.
"""

import numpy as np

EPS = np.finfo(np.float64).eps


def cholesky(G):
    """Lower factor ``L`` with ``G = L @ L^H``, plus the first failing pivot (-1 if none)."""
    n = G.shape[0]
    L = np.zeros((n, n), dtype=np.complex128)
    for j in range(n):
        row = L[j, :j]
        s = G[j, j].real - np.vdot(row, row).real
        if not s > 0.0:
            return L, j
        d = np.sqrt(s)
        L[j, j] = d
        if j + 1 < n:
            L[j + 1:, j] = (G[j + 1:, j] - L[j + 1:, :j] @ row.conj()) / d
    return L, -1


def cholesky_solve(L, B):
    """Solve ``L L^H X = B`` for a 2-D right-hand side ``B``."""
    n = L.shape[0]
    Y = np.array(B, dtype=np.complex128)
    for i in range(n):
        Y[i] = (Y[i] - L[i, :i] @ Y[:i]) / L[i, i]
    X = Y
    for i in range(n - 1, -1, -1):
        X[i] = (X[i] - L[i + 1:, i].conj() @ X[i + 1:]) / L[i, i].real
    return X


def lu_factor(A):
    """In-place-style LU with partial pivoting.

    Returns ``(LU, perm, bad)`` where ``A[perm] = L @ U`` and ``bad`` is the
    first pivot index whose magnitude fell below ``n * eps * max|A|`` (-1 if none).
    """
    LU = np.array(A, copy=True)
    n = LU.shape[0]
    perm = np.arange(n)
    tol = n * EPS * (np.abs(LU).max() if LU.size else 0.0)
    for k in range(n):
        p = k + int(np.argmax(np.abs(LU[k:, k])))
        if not np.abs(LU[p, k]) > tol:
            return LU, perm, k
        if p != k:
            LU[[k, p]] = LU[[p, k]]
            perm[[k, p]] = perm[[p, k]]
        LU[k + 1:, k] /= LU[k, k]
        LU[k + 1:, k + 1:] -= np.outer(LU[k + 1:, k], LU[k, k + 1:])
    return LU, perm, -1


def lu_solve(LU, perm, B):
    n = LU.shape[0]
    X = np.array(B[perm], dtype=np.result_type(LU, B))
    for i in range(n):
        X[i] -= LU[i, :i] @ X[:i]
    for i in range(n - 1, -1, -1):
        X[i] = (X[i] - LU[i, i + 1:] @ X[i + 1:]) / LU[i, i]
    return X


def lu_solve_adjoint(LU, perm, B):
    """Solve ``A^H X = B`` from the factors of ``A``."""
    n = LU.shape[0]
    X = np.array(B, dtype=np.result_type(LU, B))
    for i in range(n):
        X[i] = (X[i] - LU[:i, i].conj() @ X[:i]) / np.conj(LU[i, i])
    for i in range(n - 1, -1, -1):
        X[i] -= LU[i + 1:, i].conj() @ X[i + 1:]
    out = np.empty_like(X)
    out[perm] = X
    return out


def objective_terms(A):
    """Row norms of ``A^-1`` and norms of the running column sums of ``A``."""
    n = A.shape[0]
    LU, perm, bad = lu_factor(A)
    if bad >= 0:
        return np.zeros(0), np.zeros(0), False
    inv = lu_solve(LU, perm, np.eye(n, dtype=LU.dtype))
    rows = np.sqrt((np.abs(inv) ** 2).sum(axis=1))
    partial = np.sqrt((np.abs(np.cumsum(A, axis=1)) ** 2).sum(axis=0))
    return rows, partial, True


def running_maximal(terms, rtol):
    """Running sums along axis 0 with their pointwise maximal modulus.

    ``stop`` is the first (1-based) index attaining it within relative tolerance ``rtol``."""
    partial = np.cumsum(terms, axis=0)
    mod = np.abs(partial)
    smax = mod.max(axis=0)
    stop = np.argmax(mod >= smax * (1.0 - rtol), axis=0) + 1
    return partial, smax, stop.astype(np.int64)


def fourier_running_max(coef, degree):
    """Pointwise max over ``0 <= m <= degree`` of ``|sum_{|k|<=m} c_k e(kx)|``.

    ``coef`` holds discrete Fourier coefficients in numpy FFT order.
    """
    N = coef.shape[0]
    idx = np.arange(N)
    table = np.exp(2j * np.pi * idx / N)
    running = np.full(N, coef[0], dtype=np.complex128)
    best = np.abs(running)
    for m in range(1, degree + 1):
        cp = coef[m % N]
        cm = coef[(-m) % N]
        if cp == 0 and cm == 0:
            continue
        w = table[(m * idx) % N]
        running += cp * w + cm * w.conj()
        np.maximum(best, np.abs(running), out=best)
    return best
