"""Dense complex linear algebra on small matrices.

Inner products conjugate the *second* argument, ``inner(u, v) = sum(u * conj(v))``.
Every other module inherits this convention.

The Cholesky and LU factorizations live in :mod:`biorth.kernels`; this module
wraps them with input validation, condition estimation and error reporting.
"""

import numpy as np

from . import kernels
from .errors import InputError, SingularityError, SingularMatrixError

DEFAULT_COND_CAP = 1e12


def as_vector(u, name="vector"):
    arr = np.asarray(u, dtype=np.complex128)
    if arr.ndim != 1 or arr.size == 0:
        raise InputError(f"{name} must be a non-empty 1-D sequence, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name} contains NaN or Inf")
    return arr


def as_vectors(V, name="vector set"):
    """Validate an ordered family of vectors given as rows of a 2-D array."""
    arr = np.asarray(V, dtype=np.complex128)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise InputError(f"{name} must be a non-empty 2-D array (n vectors x d), got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name} contains NaN or Inf")
    return arr


def as_square(A, name="matrix"):
    arr = np.asarray(A)
    if not np.iscomplexobj(arr):
        arr = arr.astype(np.float64)
    else:
        arr = arr.astype(np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise InputError(f"{name} must be square, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name} contains NaN or Inf")
    return arr


def inner(u, v):
    u = as_vector(u, "u")
    v = as_vector(v, "v")
    if u.shape != v.shape:
        raise InputError(f"length mismatch: {u.size} vs {v.size}")
    return complex(np.sum(u * np.conj(v)))


def gram(V, weight=1.0):
    """Gram matrix ``G[j, k] = <v_k, v_j>`` of the rows of ``V``.

    ``weight`` scales the inner product, e.g. ``1/N`` for grid functions.
    """
    V = as_vectors(V)
    G = weight * (V.conj() @ V.T)
    # exact Hermitian symmetry regardless of BLAS summation order
    return 0.5 * (G + G.conj().T)


def _onenorm_inverse_estimate(solve, solve_adjoint, n, dtype):
    """Hager's estimate of ``||A^-1||_1`` using only solves with the factors,
    safeguarded by Higham's alternating-sign test vector."""
    x = np.full((n, 1), 1.0 / n, dtype=dtype)
    est = 0.0
    seen = set()
    for it in range(5):
        y = solve(x)
        new = float(np.abs(y).sum())
        if it > 0 and new <= est:
            break
        est = new
        mag = np.abs(y)
        xi = np.where(mag > 0, y / np.where(mag > 0, mag, 1.0), 1.0).astype(dtype)
        z = solve_adjoint(xi)
        j = int(np.argmax(np.abs(z[:, 0])))
        if it > 0 and (np.abs(z[j, 0]) <= np.real(np.vdot(x[:, 0], z[:, 0])) or j in seen):
            break
        seen.add(j)
        x = np.zeros((n, 1), dtype=dtype)
        x[j, 0] = 1.0
    if n > 1:
        b = np.array([(-1) ** i * (1.0 + i / (n - 1)) for i in range(n)], dtype=dtype)[:, None]
        alt = 2.0 * float(np.abs(solve(b)).sum()) / (3.0 * n)
        est = max(est, alt)
    return est


def cholesky_factor(G, cond_cap=DEFAULT_COND_CAP):
    """Lower Cholesky factor of a Hermitian positive-definite matrix.

    Returns ``(L, cond)`` where ``cond`` is a 1-norm condition estimate.
    Raises :class:`SingularityError` on a non-positive pivot or when ``cond``
    exceeds ``cond_cap``.
    """
    G = np.asarray(G, dtype=np.complex128)
    if G.ndim != 2 or G.shape[0] != G.shape[1] or G.shape[0] == 0:
        raise InputError(f"Gram matrix must be square, got shape {G.shape}")
    if not np.all(np.isfinite(G)):
        raise InputError("Gram matrix contains NaN or Inf")
    scale = max(np.abs(G).max(), np.finfo(float).tiny)
    if np.abs(G - G.conj().T).max() > 1e-12 * scale:
        raise InputError("matrix is not Hermitian")
    L, bad = kernels.cholesky(G)
    if bad >= 0:
        raise SingularityError(f"non-positive pivot at index {bad}", pivot=bad)
    n = G.shape[0]
    solve = lambda B: kernels.cholesky_solve(L, B)
    cond = np.abs(G).sum(axis=0).max() * _onenorm_inverse_estimate(solve, solve, n, np.complex128)
    if cond_cap is not None and not cond <= cond_cap:
        # the smallest diagonal entry of L marks the weakest pivot
        worst = int(np.argmin(np.abs(np.diag(L))))
        raise SingularityError(
            f"condition estimate {cond:.3e} exceeds cap {cond_cap:.3e} (weakest pivot at index {worst})",
            pivot=worst,
            condition=cond,
        )
    return L, cond


def solve_hpd(G, rhs, cond_cap=DEFAULT_COND_CAP):
    """Solve ``G x = rhs`` for Hermitian positive-definite ``G`` by Cholesky."""
    L, _ = cholesky_factor(G, cond_cap)
    rhs = np.asarray(rhs, dtype=np.complex128)
    if rhs.shape[0] != L.shape[0]:
        raise InputError(f"rhs length {rhs.shape[0]} does not match matrix order {L.shape[0]}")
    if rhs.ndim == 1:
        return kernels.cholesky_solve(L, rhs[:, None])[:, 0]
    return kernels.cholesky_solve(L, rhs)


def lu(A):
    """LU factors of a square matrix; raises on a (numerically) zero pivot."""
    A = as_square(A)
    LU, perm, bad = kernels.lu_factor(A)
    if bad >= 0:
        raise SingularMatrixError(f"zero pivot at index {bad} after partial pivoting", pivot=bad)
    return LU, perm


def lu_condition(A, LU, perm):
    """1-norm condition estimate of ``A`` from its LU factors."""
    n = LU.shape[0]
    LUc = LU.astype(np.complex128)
    solve = lambda B: kernels.lu_solve(LUc, perm, B)
    solve_adj = lambda B: kernels.lu_solve_adjoint(LUc, perm, B)
    return np.abs(A).sum(axis=0).max() * _onenorm_inverse_estimate(solve, solve_adj, n, np.complex128)


def inverse_rows(A, cond_cap=None):
    """Rows ``b_1, ..., b_n`` of ``A^-1`` (as the rows of a 2-D array).

    With ``cond_cap`` set, an ill-conditioned ``A`` is rejected as singular.
    """
    A = as_square(A)
    LU, perm = lu(A)
    if cond_cap is not None:
        cond = lu_condition(A, LU, perm)
        if not cond <= cond_cap:
            raise SingularMatrixError(
                f"condition estimate {cond:.3e} exceeds cap {cond_cap:.3e}", condition=cond
            )
    return kernels.lu_solve(LU, perm, np.eye(A.shape[0], dtype=LU.dtype))
