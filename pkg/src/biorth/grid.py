"""Functions sampled on a uniform grid of [0, 1).

The circle [0, 2*pi) with ``e^{imx}`` and measure ``dx/2pi`` is mapped to
[0, 1) with ``e(mx) = exp(2*pi*i*m*x)`` and measure ``dx``; all L^p norms are
unchanged by the map. A grid of ``N`` points carries weight ``1/N`` per point,
so integrals are means and ``||f||_1 = mean|f|``.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import InputError, ResolutionError
from .pairs import DEFAULT_CERT_TOL, certify, inequality_functional, norms

STOP_RTOL = 1e-12
ZERO_RTOL = 1e-14


@dataclass(frozen=True)
class Grid:
    N: int

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 2:
            raise InputError(f"grid needs N >= 2 points, got {self.N}")

    @property
    def weight(self):
        return 1.0 / self.N

    @property
    def points(self):
        return np.arange(self.N) / self.N

    def integral(self, f, axis=-1):
        return np.mean(f, axis=axis)

    def norm1(self, f, axis=-1):
        return np.mean(np.abs(f), axis=axis)

    def norm2(self, f, axis=-1):
        return np.sqrt(np.mean(np.abs(f) ** 2, axis=axis))

    def norm_inf(self, f, axis=-1):
        return np.max(np.abs(f), axis=axis)

    def inner(self, f, g):
        return complex(np.mean(f * np.conj(g)))

    def character(self, m):
        """``e(m x_i)`` with the phase reduced exactly modulo ``N``."""
        i = np.arange(self.N, dtype=np.int64)
        return np.exp(2j * np.pi * ((int(m) * i) % self.N) / self.N)


@dataclass(frozen=True)
class OrthonormalSystem:
    """``values[k]`` holds the samples of ``h_{k+1}``."""

    values: np.ndarray
    grid: Grid
    freqs: np.ndarray = None

    @property
    def n(self):
        return self.values.shape[0]

    def gram(self):
        return (self.values @ self.values.conj().T) / self.grid.N

    def orthonormality_residual(self):
        return float(np.abs(self.gram() - np.eye(self.n)).max())

    def mixed(self, U):
        """The system ``U @ h``; orthonormal again when ``U`` is unitary."""
        return OrthonormalSystem(np.asarray(U) @ self.values, self.grid)


def as_frequencies(freqs, strict=True):
    arr = np.asarray(freqs)
    if arr.ndim != 1 or arr.size == 0:
        raise InputError("frequencies must be a non-empty 1-D list of integers")
    if not np.all(np.equal(np.mod(arr, 1), 0)):
        raise InputError("frequencies must be integers")
    arr = arr.astype(np.int64)
    if strict and np.any(np.diff(arr) <= 0):
        raise InputError("frequencies must be strictly increasing")
    return arr


def _coefficient(item):
    if isinstance(item, (list, tuple)) and len(item) == 2:
        return complex(item[0], item[1])
    return complex(item)


def as_coefficients(a, n=None):
    """Complex coefficients from numbers, ``[re, im]`` pairs, or a mix of both."""
    if isinstance(a, (list, tuple)):
        try:
            arr = np.array([_coefficient(item) for item in a], dtype=np.complex128)
        except (TypeError, ValueError) as exc:
            raise InputError(f"coefficients must be numbers or [re, im] pairs ({exc})") from exc
    else:
        arr = np.asarray(a)
        if arr.ndim == 2 and arr.shape[1] == 2 and not np.iscomplexobj(arr):
            arr = arr[:, 0] + 1j * arr[:, 1]
        arr = arr.astype(np.complex128)
    if arr.ndim != 1 or arr.size == 0:
        raise InputError("coefficients must be a non-empty 1-D sequence")
    if n is not None and arr.size != n:
        raise InputError(f"expected {n} coefficients, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise InputError("coefficients contain NaN or Inf")
    if np.any(arr == 0):
        raise InputError("coefficients must be non-zero")
    return arr


def trig_system(freqs, grid):
    """``h_k = e(m_k x)`` for strictly increasing integer frequencies."""
    freqs = as_frequencies(freqs)
    top = int(np.abs(freqs).max())
    if not grid.N > 2 * top:
        raise ResolutionError(f"grid of {grid.N} points aliases frequency {top}; need N > {2 * top}")
    values = np.stack([grid.character(m) for m in freqs])
    return OrthonormalSystem(values, grid, freqs)


def dirichlet_kernel(m, grid):
    """``D_m(x) = sum_{|k|<=m} e(kx) = sin((2m+1) pi x) / sin(pi x)``, ``D_m(0) = 2m+1``."""
    m = int(m)
    if m < 0:
        raise InputError(f"Dirichlet kernel order must be >= 0, got {m}")
    if not grid.N > 2 * (2 * m + 1):
        raise ResolutionError(f"grid of {grid.N} points too coarse for D_{m}; need N > {2 * (2 * m + 1)}")
    N = grid.N
    i = np.arange(N, dtype=np.int64)
    num = np.sin(np.pi * (((2 * m + 1) * i) % (2 * N)) / N)
    den = np.sin(np.pi * i / N)
    out = np.empty(N)
    out[0] = 2 * m + 1
    out[1:] = num[1:] / den[1:]
    return out


def lebesgue_resolution(m, factor=64):
    return factor * (2 * int(m) + 1)


def lebesgue_constant(m, N=None):
    """``||D_m||_1`` by grid quadrature.

    When ``N`` is a multiple of ``2m+1`` the kernel's zeros ``k/(2m+1)`` are grid
    nodes and the rectangle rule is completed by the Euler-Maclaurin term for
    the derivative jumps of ``|D_m|`` there, leaving an O(N^-4) error.
    """
    m = int(m)
    need = lebesgue_resolution(m)
    if N is None:
        N = need
    if N < need:
        raise ResolutionError(f"need N >= {need} points for the Lebesgue constant of order {m}, got {N}")
    value = float(np.mean(np.abs(dirichlet_kernel(m, Grid(N)))))
    q = 2 * m + 1
    if m > 0 and N % q == 0:
        k = np.arange(1, 2 * m + 1)
        slopes = q * np.pi / np.sin(np.pi * k / q)
        value += 2.0 * slopes.sum() / (12.0 * N * N)
    return value


def lebesgue_sweep(ms, factor=64):
    """Lebesgue constants for each ``m`` and the least-squares slope against ``ln m``."""
    ms = [int(m) for m in ms]
    rows = []
    for m in ms:
        N = lebesgue_resolution(m, factor)
        rows.append({"m": m, "N": N, "lebesgue": lebesgue_constant(m, N)})
    slope = intercept = None
    positive = [r for r in rows if r["m"] >= 1]
    if len(positive) >= 2:
        x = np.log([r["m"] for r in positive])
        y = np.array([r["lebesgue"] for r in positive])
        slope, intercept = (float(v) for v in np.polyfit(x, y, 1))
    return rows, slope, intercept


@dataclass(frozen=True)
class DirichletAudit:
    m: int
    N: int
    peak: float  # max |D_m|
    peak_excess: float  # max |D_m| - (2m+1)
    kappa: float  # smallest constant with |D_m| <= kappa / dist on the tail range


def dirichlet_audit(m, N=None):
    """Check ``|D_m| <= 2m+1`` and measure the constant of the ``1/|x|`` tail bound.

    The tail range is ``1/(2m+1) < t < 2*pi - 1/(2m+1)`` in circle coordinates
    ``t = 2*pi*x``; ``dist`` is the distance from ``t`` to 0 on the circle.
    """
    m = int(m)
    if N is None:
        N = max(1 << 16, 8 * (2 * m + 1))
    D = dirichlet_kernel(m, Grid(N))
    t = 2 * np.pi * np.arange(N) / N
    cut = 1.0 / (2 * m + 1)
    mask = (t > cut) & (t < 2 * np.pi - cut)
    dist = np.minimum(t, 2 * np.pi - t)
    kappa = float(np.max(np.abs(D[mask]) * dist[mask])) if mask.any() else 0.0
    peak = float(np.abs(D).max())
    return DirichletAudit(m, N, peak, peak - (2 * m + 1), kappa)


@dataclass(frozen=True)
class MaximalData:
    partial: np.ndarray  # S_k on the grid, shape (n, N)
    smax: np.ndarray  # S*(x) = max_k |S_k(x)|
    stop: np.ndarray  # first k (1-based) attaining S*(x)
    M: float  # max_j ||h_j||_inf
    grid: Grid

    @property
    def n(self):
        return self.partial.shape[0]

    @property
    def smax_l1(self):
        return float(self.grid.norm1(self.smax))

    def partial_l1(self):
        return self.grid.norm1(self.partial, axis=1)


def maximal_data(a, h):
    a = as_coefficients(a, h.n)
    terms = a[:, None] * h.values
    partial, smax, stop = kernels.running_maximal(np.ascontiguousarray(terms), STOP_RTOL)
    M = float(np.abs(h.values).max())
    return MaximalData(partial, smax, stop, M, h.grid)


def salem_vectors(a, h, data=None):
    """``v_j = a_j h_j / sqrt(S*)`` and ``w_j = h_j sqrt(S*) / conj(a_j)``, zero where S* vanishes."""
    a = as_coefficients(a, h.n)
    if data is None:
        data = maximal_data(a, h)
    smax = data.smax
    live = smax >= ZERO_RTOL * smax.max()
    root = np.where(live, np.sqrt(np.where(live, smax, 1.0)), 0.0)
    inv_root = np.where(live, 1.0 / np.where(live, root, 1.0), 0.0)
    V = a[:, None] * h.values * inv_root
    W = h.values * root / np.conj(a)[:, None]
    return V, W, data


def salem_pair(a, h, tol=DEFAULT_CERT_TOL, data=None):
    V, W, _ = salem_vectors(a, h, data)
    return certify(V, W, tol, weight=h.grid.weight)


def salem_bounds(a, h, data=None, pair=None):
    """Slacks (RHS - LHS) of the two norm bounds satisfied by the Salem pair.

    ``||w_j||^2 <= M^2 / min|a|^2 * ||S*||_1`` for every ``j``, and
    ``||v_1 + ... + v_k||^2 <= ||S_k||_1`` for every ``k``.
    """
    a = as_coefficients(a, h.n)
    if data is None:
        data = maximal_data(a, h)
    if pair is None:
        pair = salem_pair(a, h, data=data)
    w_sq = norms(pair.W, pair.weight) ** 2
    w_rhs = data.M**2 / np.abs(a).min() ** 2 * data.smax_l1
    sigma_sq = norms(np.cumsum(pair.V, axis=0), pair.weight) ** 2
    sigma_rhs = data.partial_l1()
    return {
        "w_bound_slack": float(np.min(w_rhs - w_sq)),
        "sigma_bound_slack": float(np.min(sigma_rhs - sigma_sq)),
    }


def fourier_coefficients(p):
    p = np.asarray(p, dtype=np.complex128)
    return np.fft.fft(p) / p.size


def fourier_maximal(p, degree, rtol=1e-9):
    """``max_{0<=m<=degree} |D_m * p|`` for a trigonometric polynomial ``p``.

    ``p`` is given by its samples; coefficients above ``degree`` must vanish
    (relative to the largest coefficient, within ``rtol``).
    """
    p = np.asarray(p, dtype=np.complex128)
    if p.ndim != 1:
        raise InputError("p must be a 1-D array of grid samples")
    degree = int(degree)
    N = p.size
    if degree < 0 or not N > 2 * degree:
        raise ResolutionError(f"grid of {N} points cannot resolve degree {degree}; need N > {2 * degree}")
    c = fourier_coefficients(p)
    k = np.fft.fftfreq(N, d=1.0 / N)
    scale = np.abs(c).max()
    high = np.abs(c[np.abs(k) > degree])
    if high.size and scale > 0 and high.max() > rtol * scale:
        raise InputError(
            f"p is not a trigonometric polynomial of degree {degree}: coefficient of size {high.max():.3e} above it"
        )
    c = np.where(np.abs(k) > degree, 0.0, c)
    return kernels.fourier_running_max(c, degree)


@dataclass(frozen=True)
class CorollaryReport:
    kind: str
    n: int
    N: int
    lhs: float
    rhs_factors: dict
    product: float
    c_empirical: float
    c_required: float = None
    holds: bool = True
    extra: dict = field(default_factory=dict)

    def as_dict(self):
        return {
            "kind": self.kind,
            "n": self.n,
            "N": self.N,
            "lhs": self.lhs,
            "rhs_factors": dict(self.rhs_factors),
            "product": self.product,
            "c_empirical": self.c_empirical,
            "c_required": self.c_required,
            "holds": self.holds,
            **self.extra,
        }


COROLLARY_KINDS = ("maxmaxmax", "decreasing", "littlewood", "maximal-lemma")


def default_grid_size(top_freq, floor=4096):
    N = floor
    while not N > 4 * top_freq:
        N *= 2
    return N


def _theorem_constant(a, h, data):
    pair = salem_pair(a, h, data=data)
    rep = inequality_functional(pair)
    return rep.c_empirical, rep


def corollary_report(kind, a=None, freqs=None, n=None, N=None):
    """Both sides of one of the L^1 corollaries and the implied constant.

    ``c_required`` is the constant the corollary needs *given* the constant
    the bi-orthogonal inequality needs on the matching Salem pair (and, for
    ``littlewood``, the measured maximal-lemma ratio); ``holds`` records
    whether ``c_empirical`` stays within it. For ``maximal-lemma`` the ratio is only recorded.
    """
    if kind not in COROLLARY_KINDS:
        raise InputError(f"unknown corollary kind {kind!r}; expected one of {', '.join(COROLLARY_KINDS)}")

    if kind == "maximal-lemma":
        return _maximal_lemma_report(a, freqs, n, N)

    if freqs is None:
        if n is None:
            n = len(a) if a is not None else None
        if n is None:
            raise InputError("need n, freqs or coefficients")
        freqs = [2**k for k in range(1, n + 1)] if kind == "littlewood" else list(range(1, n + 1))
    freqs = as_frequencies(freqs)
    n = freqs.size
    if a is None:
        a = np.ones(n)
    a = as_coefficients(a, n)
    if kind == "decreasing":
        if np.any(np.abs(a.imag) > 0) or np.any(a.real <= 0):
            raise InputError("decreasing corollary needs positive real coefficients")
        if np.any(np.diff(a.real) > 0):
            raise InputError("decreasing corollary needs a non-increasing coefficient sequence")
    if kind == "littlewood" and np.any(freqs < 0):
        raise InputError("littlewood corollary needs non-negative strictly increasing frequencies")
    if N is None:
        N = default_grid_size(int(np.abs(freqs).max()))
    grid = Grid(N)
    h = trig_system(freqs, grid)
    data = maximal_data(a, h)
    c_theorem, pair_report = _theorem_constant(a, h, data)
    smax_l1 = data.smax_l1
    partial_l1 = data.partial_l1()
    max_partial_l1 = float(partial_l1.max())
    amin = float(np.abs(a).min())
    M = data.M
    log_n = math.log(n)

    if kind in ("maxmaxmax", "decreasing"):
        lhs = (float(a.real[-1]) if kind == "decreasing" else amin) * log_n
        product = M * math.sqrt(smax_l1 * max_partial_l1)
        rhs = {
            "M_n": M,
            "maximal_l1": smax_l1,
            "max_partial_l1": max_partial_l1,
            "min_abs_a": amin,
            "product_linear": M * smax_l1,
        }
        c_emp = lhs / product if product > 0 else math.inf
        c_req = c_theorem
        extra = {"c_empirical_linear": lhs / (M * smax_l1) if smax_l1 > 0 else math.inf}
    else:
        top = int(freqs.max())
        log_top = math.log(2 * top + 1)
        lhs = amin * log_n / math.sqrt(log_top)
        product = max_partial_l1
        p = data.partial[-1]
        lemma = float(grid.norm1(fourier_maximal(p, top))) / (log_top * float(grid.norm1(p)))
        rhs = {
            "max_partial_l1": max_partial_l1,
            "log_2m_plus_1": log_top,
            "min_abs_a": amin,
            "M_n": M,
            "maximal_lemma_ratio": lemma,
        }
        c_emp = lhs / product if product > 0 else math.inf
        c_req = c_theorem * M * math.sqrt(lemma)
        extra = {}
    extra["theorem_constant"] = c_theorem
    extra["pair_product"] = pair_report.product
    holds = bool(c_emp <= c_req * (1 + 1e-9))
    return CorollaryReport(kind, n, N, lhs, rhs, product, c_emp, c_req, holds, extra)


def _maximal_lemma_report(a, freqs, n, N):
    if freqs is None:
        if n is None:
            raise InputError("maximal-lemma needs n (for p = D_n) or explicit frequencies")
        freqs = list(range(-int(n), int(n) + 1))
    freqs = as_frequencies(freqs)
    if a is None:
        a = np.ones(freqs.size)
    a = as_coefficients(a, freqs.size)
    degree = int(np.abs(freqs).max())
    if N is None:
        N = default_grid_size(2 * degree + 1)
    grid = Grid(N)
    h = trig_system(freqs, grid)
    p = a @ h.values
    smax = fourier_maximal(p, degree)
    lhs = float(grid.norm1(smax))
    p_l1 = float(grid.norm1(p))
    log_term = math.log(2 * degree + 1)
    product = log_term * p_l1
    ratio = lhs / product if product > 0 else math.inf
    rhs = {"p_l1": p_l1, "log_2N_plus_1": log_term, "degree": degree}
    return CorollaryReport("maximal-lemma", freqs.size, N, lhs, rhs, product, ratio, None, bool(math.isfinite(ratio)))
