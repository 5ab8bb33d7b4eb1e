"""Step-by-step numerical execution of the lower-bound argument.

Given an orthonormal system ``F_1..F_n`` on a grid, a bi-orthogonal pair
``(v, w)`` in ``H = C^d`` and a bounded function ``G``, the argument builds

* the stopping time ``m(x)``: first index where ``|F_1 + ... + F_k|`` peaks,
* the ladder ``f_k = 1{m(x) >= k}`` and its differences ``df_k = f_k - f_{k+1}``,
* ``p_k(x) = F_k(x) w_k`` and ``P_G(x) = G(x) sum_j f_j(x) v_j`` in ``L^2([0,1], H)``,

and chains Bessel's inequality, summation by parts and Cauchy-Schwarz into
``||M||_1 <= sqrt(n) max||w|| max||sigma|| ||G||_2``. :func:`chain_check`
evaluates every link on concrete data.
"""

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import kernels
from .errors import DegenerateInputError, InputError, InternalConsistencyError
from .grid import STOP_RTOL, Grid, OrthonormalSystem, trig_system
from .pairs import matrix_pair, norms

SLACK_TOL = 1e-9
IDENTITY_TOL = 1e-12
STRUCTURAL_TOL = 1e-10


@dataclass(frozen=True)
class StoppingData:
    M: np.ndarray  # max_j |S_j(x)|
    stop: np.ndarray  # m(x), 1-based
    ladder: np.ndarray  # f_k(x), shape (n, N), values 0/1
    deltas: np.ndarray  # f_k - f_{k+1}
    partial: np.ndarray  # S_j(x), shape (n, N)
    S_at_m: np.ndarray  # S_{m(x)}(x)

    @property
    def n(self):
        return self.ladder.shape[0]


def stopping_data(F):
    partial, M, stop = kernels.running_maximal(np.ascontiguousarray(F.values, dtype=np.complex128), STOP_RTOL)
    n, N = partial.shape
    ladder = (stop[None, :] >= np.arange(1, n + 1)[:, None]).astype(np.float64)
    deltas = ladder - np.vstack([ladder[1:], np.zeros((1, N))])
    S_at_m = partial[stop - 1, np.arange(N)]
    return StoppingData(M, stop, ladder, deltas, partial, S_at_m)


def phase_witness(S_at_m):
    """Unimodular ``G`` with ``G * conj(S) = |S|``; ``G = 1`` where ``S`` is negligible."""
    S = np.asarray(S_at_m, dtype=np.complex128)
    mag = np.abs(S)
    live = mag > 1e-14 * mag.max() if mag.size else mag > 0
    return np.where(live, S / np.where(live, mag, 1.0), 1.0 + 0j)


def bessel_slack(P, F, W, weight=1.0):
    """``||P||^2 - sum_k |<P, p_k>|^2 / ||w_k||^2`` for ``P`` given as an (N, d) array."""
    P = np.asarray(P, dtype=np.complex128)
    coeffs = _v_coefficients(P, F, W, weight)
    lhs = float(np.sum(np.abs(coeffs) ** 2 / norms(W, weight) ** 2))
    rhs = float(np.mean(weight * np.sum(np.abs(P) ** 2, axis=1)))
    return rhs - lhs


def _v_coefficients(P, F, W, weight):
    # <P, p_k>_V = mean_x <P(x), w_k>_H conj(F_k(x))
    pointwise = weight * (P @ W.conj().T)
    return np.mean(pointwise * F.values.T.conj(), axis=0)


@dataclass(frozen=True)
class ChainReport:
    bessel_slack: float
    bigbess_slack: float
    mainpoint_slack: float
    gsf_slack: float
    abel_residual: float
    witness_identity_residual: float
    energy_slack: float
    conclusion_slack: float
    orthogonality_residual: float
    pointwise_norm_residual: float
    stopped_sum_residual: float
    n: int
    N: int

    SLACKS = ("bessel_slack", "bigbess_slack", "mainpoint_slack", "gsf_slack", "energy_slack", "conclusion_slack")

    def min_slack(self):
        return min(getattr(self, name) for name in self.SLACKS)

    def ok(self, slack_tol=SLACK_TOL):
        return self.min_slack() >= -slack_tol

    def as_dict(self):
        out = asdict(self)
        out["min_slack"] = self.min_slack()
        out["ok"] = self.ok()
        return out


def chain_check(F, pair, G, stopping=None):
    """Evaluate every inequality and identity of the argument on concrete data.

    Raises :class:`InternalConsistencyError` when a structural identity
    (orthogonality of the ``p_k``, summation by parts, pointwise norms, the
    stopped-sum identity) is off by more than 1e-10; those can only fail
    through an implementation bug.
    """
    n, N = F.values.shape
    if pair.n != n:
        raise InputError(f"system has {n} functions but the pair has {pair.n} vectors")
    G = np.asarray(G, dtype=np.complex128)
    if G.shape != (N,):
        raise InputError(f"G must have {N} grid samples, got shape {G.shape}")
    if np.abs(G).max() > 1 + 1e-12:
        raise InputError("G must satisfy |G| <= 1")
    ortho = F.orthonormality_residual()
    if ortho > STRUCTURAL_TOL:
        raise InputError(f"system is not orthonormal on its grid (residual {ortho:.3e})")
    st = stopping if stopping is not None else stopping_data(F)
    V, W, wH = pair.V, pair.W, pair.weight

    # p_k orthogonality: <p_j, p_k>_V = <F_j, F_k> <w_j, w_k>_H
    pgram = F.gram() * (wH * (W @ W.conj().T))
    pn = np.sqrt(np.abs(np.diag(pgram)))
    off = np.abs(pgram - np.diag(np.diag(pgram))) / np.outer(pn, pn)
    orth_res = float(off.max())

    sigma = np.cumsum(V, axis=0)
    sigma_sq = wH * np.sum(np.abs(sigma) ** 2, axis=1)
    sigma_max_sq = float(sigma_sq.max())
    w_norms = norms(W, wH)
    w_max = float(w_norms.max())
    G_sq = float(np.mean(np.abs(G) ** 2))

    P_direct = G[:, None] * (st.ladder.T @ V)
    P_abel = G[:, None] * (st.deltas.T @ sigma)
    scale = max(float(np.abs(V).max(axis=1).sum()) * max(float(np.abs(G).max()), 1e-300), 1e-300)
    abel_res = float(np.abs(P_direct - P_abel).max()) / scale

    pointwise = wH * np.sum(np.abs(P_direct) ** 2, axis=1)
    predicted = np.abs(G) ** 2 * (st.deltas.T @ sigma_sq)
    pw_scale = max(sigma_max_sq * max(float(np.abs(G).max()) ** 2, 1e-300), 1e-300)
    pw_res = float(np.abs(pointwise - predicted).max()) / pw_scale

    energy = float(np.mean(pointwise))
    energy_slack = G_sq * sigma_max_sq - energy

    coeffs = _v_coefficients(P_direct, F, W, wH)
    bessel = energy - float(np.sum(np.abs(coeffs) ** 2 / w_norms**2))

    integrals = np.mean(G[None, :] * st.ladder * F.values.conj(), axis=1)
    sq = np.abs(integrals) ** 2
    bigbess = G_sq * sigma_max_sq - float(np.sum(sq / w_norms**2))
    mainpoint = w_max**2 * G_sq * sigma_max_sq - float(np.sum(sq))

    stopped = complex(np.mean(G * st.S_at_m.conj()))
    stopped_res = abs(stopped - complex(np.sum(integrals))) / max(float(np.abs(st.S_at_m).max()), 1e-300)
    gsf = math.sqrt(n) * math.sqrt(float(np.sum(sq))) - abs(stopped)
    conclusion = math.sqrt(n) * w_max * math.sqrt(sigma_max_sq) * math.sqrt(G_sq) - abs(stopped)

    witness_res = float(np.abs(G * st.S_at_m.conj() - st.M).max()) / max(float(st.M.max()), 1e-300)

    for name, value in (
        ("orthogonality of p_k", orth_res),
        ("summation by parts", abel_res),
        ("pointwise norm identity", pw_res),
        ("stopped-sum identity", stopped_res),
    ):
        if not value <= STRUCTURAL_TOL:
            raise InternalConsistencyError(f"{name} residual {value:.3e} exceeds {STRUCTURAL_TOL:.0e}")

    return ChainReport(
        bessel_slack=bessel,
        bigbess_slack=bigbess,
        mainpoint_slack=mainpoint,
        gsf_slack=gsf,
        abel_residual=abel_res,
        witness_identity_residual=witness_res,
        energy_slack=energy_slack,
        conclusion_slack=conclusion,
        orthogonality_residual=orth_res,
        pointwise_norm_residual=pw_res,
        stopped_sum_residual=stopped_res,
        n=n,
        N=N,
    )


@dataclass(frozen=True)
class MenshovLevel:
    t_star: float
    c0_empirical: float
    n: int
    N: int
    measure_at_t_star: float  # grid measure of {M >= t*}


def menshov_level(F, stopping=None):
    """Largest level exceeded by the maximal partial sum on a quarter of the grid.

    ``t*`` is the supremum of the ``t`` with ``measure{M > t} >= 1/4``: the
    ``ceil(N/4)``-th largest value of ``M``. The normalized level is
    ``t* / (sqrt(n) ln n)``.
    """
    n, N = F.values.shape
    if n < 2:
        raise DegenerateInputError("menshov level needs n >= 2 (ln 1 = 0)")
    st = stopping if stopping is not None else stopping_data(F)
    ordered = np.sort(st.M)
    t_star = float(ordered[N - math.ceil(N / 4)])
    c0 = t_star / (math.sqrt(n) * math.log(n))
    return MenshovLevel(t_star, c0, n, N, float(np.mean(st.M >= t_star)))


def random_unitary(n, rng):
    """Haar-distributed unitary via QR of a complex Gaussian with phase correction."""
    Z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2)
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))


@dataclass(frozen=True)
class Configuration:
    F: OrthonormalSystem
    pair: object
    G: np.ndarray
    stopping: StoppingData
    seed: int


def random_configuration(n, N, seed):
    """Mixed trig system, matrix-derived pair and phase witness, all from ``seed``."""
    rng = np.random.default_rng(seed)
    half = N // 2
    if n > 2 * half - 1:
        raise InputError(f"cannot draw {n} distinct alias-free frequencies on {N} points")
    freqs = np.sort(rng.choice(np.arange(-half + 1, half), size=n, replace=False))
    F = trig_system(freqs, Grid(N)).mixed(random_unitary(n, rng))
    A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    pair = matrix_pair(A)
    st = stopping_data(F)
    G = phase_witness(st.S_at_m)
    return Configuration(F, pair, G, st, seed)
