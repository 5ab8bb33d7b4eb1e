"""Loop-level numba implementations; see ``_numpy`` for the reference twins."""

import numpy as np
from numba import njit

EPS = np.finfo(np.float64).eps


@njit(cache=True, nogil=True)
def cholesky(G):
    n = G.shape[0]
    L = np.zeros((n, n), dtype=np.complex128)
    for j in range(n):
        s = G[j, j].real
        for k in range(j):
            z = L[j, k]
            s -= z.real * z.real + z.imag * z.imag
        if not s > 0.0:
            return L, j
        d = np.sqrt(s)
        L[j, j] = d
        for i in range(j + 1, n):
            t = complex(G[i, j])
            for k in range(j):
                t -= L[i, k] * np.conj(L[j, k])
            L[i, j] = t / d
    return L, -1


@njit(cache=True, nogil=True)
def cholesky_solve(L, B):
    n = L.shape[0]
    m = B.shape[1]
    X = np.empty((n, m), dtype=np.complex128)
    for c in range(m):
        for i in range(n):
            t = complex(B[i, c])
            for k in range(i):
                t -= L[i, k] * X[k, c]
            X[i, c] = t / L[i, i]
        for i in range(n - 1, -1, -1):
            t = X[i, c]
            for k in range(i + 1, n):
                t -= np.conj(L[k, i]) * X[k, c]
            X[i, c] = t / L[i, i].real
    return X


@njit(cache=True, nogil=True)
def lu_factor(A):
    LU = A.copy()
    n = LU.shape[0]
    perm = np.arange(n)
    scale = 0.0
    for i in range(n):
        for j in range(n):
            a = abs(LU[i, j])
            if a > scale:
                scale = a
    tol = n * EPS * scale
    for k in range(n):
        p = k
        best = abs(LU[k, k])
        for i in range(k + 1, n):
            a = abs(LU[i, k])
            if a > best:
                best = a
                p = i
        if not best > tol:
            return LU, perm, k
        if p != k:
            for j in range(n):
                t = LU[k, j]
                LU[k, j] = LU[p, j]
                LU[p, j] = t
            t2 = perm[k]
            perm[k] = perm[p]
            perm[p] = t2
        piv = LU[k, k]
        for i in range(k + 1, n):
            LU[i, k] /= piv
            l = LU[i, k]
            for j in range(k + 1, n):
                LU[i, j] -= l * LU[k, j]
    return LU, perm, -1


@njit(cache=True, nogil=True)
def lu_solve(LU, perm, B):
    n = LU.shape[0]
    m = B.shape[1]
    X = np.empty((n, m), dtype=LU.dtype)
    for c in range(m):
        for i in range(n):
            X[i, c] = B[perm[i], c]
            for k in range(i):
                X[i, c] -= LU[i, k] * X[k, c]
        for i in range(n - 1, -1, -1):
            t = X[i, c]
            for k in range(i + 1, n):
                t -= LU[i, k] * X[k, c]
            X[i, c] = t / LU[i, i]
    return X


@njit(cache=True, nogil=True)
def lu_solve_adjoint(LU, perm, B):
    n = LU.shape[0]
    m = B.shape[1]
    X = np.empty((n, m), dtype=LU.dtype)
    out = np.empty_like(X)
    for c in range(m):
        for i in range(n):
            X[i, c] = B[i, c]
            for k in range(i):
                X[i, c] -= np.conj(LU[k, i]) * X[k, c]
            X[i, c] = X[i, c] / np.conj(LU[i, i])
        for i in range(n - 1, -1, -1):
            t = X[i, c]
            for k in range(i + 1, n):
                t -= np.conj(LU[k, i]) * X[k, c]
            X[i, c] = t
        for i in range(n):
            out[perm[i], c] = X[i, c]
    return out


@njit(cache=True, nogil=True)
def objective_terms(A):
    n = A.shape[0]
    LU, perm, bad = lu_factor(A)
    if bad >= 0:
        return np.zeros(0), np.zeros(0), False
    inv = lu_solve(LU, perm, np.eye(n, dtype=LU.dtype))
    rows = np.empty(n)
    for i in range(n):
        s = 0.0
        for j in range(n):
            s += abs(inv[i, j]) ** 2
        rows[i] = np.sqrt(s)
    partial = np.empty(n)
    run = np.zeros(n, dtype=A.dtype)
    for j in range(n):
        s = 0.0
        for i in range(n):
            run[i] += A[i, j]
            s += abs(run[i]) ** 2
        partial[j] = np.sqrt(s)
    return rows, partial, True


@njit(cache=True, nogil=True)
def running_maximal(terms, rtol):
    # row-major sweep (k outer, grid inner) on squared moduli
    n, N = terms.shape
    partial = np.empty((n, N), dtype=np.complex128)
    sq = np.empty((n, N))
    best = np.zeros(N)
    for j in range(n):
        for x in range(N):
            s = terms[j, x] if j == 0 else partial[j - 1, x] + terms[j, x]
            partial[j, x] = s
            a = s.real * s.real + s.imag * s.imag
            sq[j, x] = a
            if a > best[x]:
                best[x] = a
    smax = np.sqrt(best)
    stop = np.zeros(N, dtype=np.int64)
    for j in range(n):
        for x in range(N):
            if stop[x] == 0 and np.sqrt(sq[j, x]) >= smax[x] * (1.0 - rtol):
                stop[x] = j + 1
    return partial, smax, stop


@njit(cache=True, nogil=True)
def fourier_running_max(coef, degree):
    N = coef.shape[0]
    table = np.empty(N, dtype=np.complex128)
    for i in range(N):
        table[i] = np.exp(2j * np.pi * i / N)
    running = np.empty(N, dtype=np.complex128)
    best = np.empty(N)
    for i in range(N):
        running[i] = coef[0]
        best[i] = abs(coef[0])
    for m in range(1, degree + 1):
        cp = coef[m % N]
        cm = coef[(-m) % N]
        if cp == 0 and cm == 0:
            continue
        for i in range(N):
            w = table[(m * i) % N]
            running[i] += cp * w + cm * np.conj(w)
            a = abs(running[i])
            if a > best[i]:
                best[i] = a
    return best
