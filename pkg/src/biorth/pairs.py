"""Bi-orthogonal pairs: certification, dual bases, matrix pairs and the
inequality functional ``max ||w_m|| * max_k ||v_1 + ... + v_k||``.

Vector families are 2-D arrays whose rows are the vectors, in order. A pair
may carry an inner-product ``weight`` (``1/N`` for functions sampled on an
``N``-point grid); norms and inner products below always include it.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import CertificationError, InputError, LinearDependenceError, SingularityError
from .linalg import DEFAULT_COND_CAP, as_square, as_vectors, cholesky_factor, gram, inverse_rows
from . import kernels

DEFAULT_CERT_TOL = 1e-8


def cross_inner(V, W, weight=1.0):
    """``R[j, k] = <v_j, w_k>``."""
    return weight * (V @ W.conj().T)


def norms(V, weight=1.0):
    return np.sqrt(weight * (np.abs(V) ** 2).sum(axis=1))


def partial_sum_norms(V, weight=1.0):
    """Norms of the running sums ``v_1 + ... + v_k``, one pass."""
    return norms(np.cumsum(V, axis=0), weight)


@dataclass(frozen=True)
class BiorthCheck:
    residual: float
    tol: float
    passed: bool


def check_biorthogonal(V, W, tol=DEFAULT_CERT_TOL, weight=1.0):
    V = as_vectors(V, "V")
    W = as_vectors(W, "W")
    if V.shape != W.shape:
        raise InputError(f"shape mismatch: V is {V.shape}, W is {W.shape}")
    R = cross_inner(V, W, weight)
    residual = float(np.abs(R - np.eye(V.shape[0])).max())
    return BiorthCheck(residual, tol, residual <= tol)


@dataclass(frozen=True)
class BiorthogonalPair:
    V: np.ndarray
    W: np.ndarray
    residual: float
    weight: float = 1.0
    certified: bool = True

    @property
    def n(self):
        return self.V.shape[0]

    @property
    def dim(self):
        return self.V.shape[1]

    def swapped(self):
        """The same pair read in the other order: ``<w_j, v_k> = conj(<v_k, w_j>)``."""
        return BiorthogonalPair(self.W, self.V, self.residual, self.weight, self.certified)


def certify(V, W, tol=DEFAULT_CERT_TOL, weight=1.0):
    """Build a :class:`BiorthogonalPair`, raising if the residual exceeds ``tol``."""
    check = check_biorthogonal(V, W, tol, weight)
    if not check.passed:
        raise CertificationError(
            f"bi-orthogonality residual {check.residual:.3e} exceeds tolerance {tol:.1e}",
            residual=check.residual,
        )
    V = np.array(V, dtype=np.complex128)
    W = np.array(W, dtype=np.complex128)
    V.setflags(write=False)
    W.setflags(write=False)
    return BiorthogonalPair(V, W, check.residual, weight)


def dual_basis(V, cond_cap=DEFAULT_COND_CAP, weight=1.0):
    """The unique ``W`` inside ``span(V)`` with ``<v_j, w_k> = delta_jk``.

    ``w_k = sum_i x_k[i] v_i`` where ``G x_k = e_k`` and ``G`` is the Gram matrix,
    solved column by column from one Cholesky factorization.
    """
    V = as_vectors(V)
    n, d = V.shape
    if n > d:
        raise LinearDependenceError(f"{n} vectors in dimension {d} cannot be linearly independent")
    G = gram(V, weight)
    try:
        L, _ = cholesky_factor(G, cond_cap)
    except SingularityError as exc:
        cond = exc.condition if exc.condition is not None else math.inf
        raise LinearDependenceError(
            f"vectors are linearly dependent or ill-conditioned (Gram condition estimate {cond:.3e}): {exc}",
            pivot=exc.pivot,
            condition=cond,
        ) from exc
    X = kernels.cholesky_solve(L, np.eye(n, dtype=np.complex128))
    # column k of X holds the expansion coefficients of w_k
    return X.T @ V


@dataclass(frozen=True)
class InequalityReport:
    n: int
    lhs: float
    w_max: float
    sigma_max: float
    product: float
    c_empirical: float
    log_base: str = "e"

    def as_dict(self):
        return {
            "n": self.n,
            "lhs": self.lhs,
            "w_max": self.w_max,
            "sigma_max": self.sigma_max,
            "product": self.product,
            "c_empirical": self.c_empirical,
            "log_base": self.log_base,
        }


def inequality_functional(pair):
    """Both sides of ``log n <= c * max ||w_m|| * max_k ||sum_{j<=k} v_j||``."""
    if not pair.certified:
        raise CertificationError("inequality functional needs a certified pair", residual=pair.residual)
    n = pair.n
    w_max = float(norms(pair.W, pair.weight).max())
    sigma_max = float(partial_sum_norms(pair.V, pair.weight).max())
    product = w_max * sigma_max
    lhs = math.log(n)
    c_emp = lhs / product if n > 1 else 0.0
    return InequalityReport(n, lhs, w_max, sigma_max, product, c_emp)


def matrix_pair(A, cond_cap=DEFAULT_COND_CAP, tol=DEFAULT_CERT_TOL):
    """Columns of ``A`` paired with the conjugated rows of ``A^-1``."""
    A = as_square(A)
    B = inverse_rows(A, cond_cap=cond_cap)
    return certify(A.T, B.conj(), tol)
