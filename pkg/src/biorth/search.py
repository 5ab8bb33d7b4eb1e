"""Empirical search for small values of

    f(A) = max_k ||row_k(A^-1)|| * max_k ||col_1(A) + ... + col_k(A)||,

the matrix form of the bi-orthogonal product. ``ln n / f(A)`` is a lower bound
for the best constant at size ``n``, so small ``f`` is what we are after.

``f`` is invariant under ``A -> tA`` and ``A -> UA`` (``U`` unitary) but not
under column permutations.
"""

import heapq
import logging
import math
import threading
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import kernels
from ._backend import default_workers
from .errors import InputError, SearchFailure, UnsupportedError
from .grid import Grid, salem_vectors, trig_system, OrthonormalSystem
from .linalg import DEFAULT_COND_CAP, as_square, inverse_rows
from .proof import random_unitary

log = logging.getLogger(__name__)


def penalty(n):
    return 1e6 * math.log(n + 1)


def objective(A, cond_cap=DEFAULT_COND_CAP):
    """Exact ``f(A)``; raises :class:`SingularMatrixError` for singular ``A``."""
    A = as_square(A)
    B = inverse_rows(A, cond_cap=cond_cap)
    rows = np.sqrt((np.abs(B) ** 2).sum(axis=1))
    partial = np.sqrt((np.abs(np.cumsum(A, axis=1)) ** 2).sum(axis=0))
    return float(rows.max() * partial.max())


def soft_max(x, tau):
    """Temperature-``tau`` soft maximum of positive values, relative to their max.

    Always ``>= max(x)``; tends to ``max(x)`` as ``tau -> 0``.
    """
    top = float(np.max(x))
    if top <= 0:
        return top
    z = (np.asarray(x) / top - 1.0) / tau
    return top * (1.0 + tau * math.log(float(np.sum(np.exp(z)))))


@dataclass(frozen=True)
class SearchConfig:
    n: int
    restarts: int = 4
    budget: int = 4000
    seed: int = 0
    tau_initial: float = 0.05
    tau_decay: float = 0.9
    tau_floor: float = 1e-3
    field: str = "real"

    def validate(self):
        if int(self.n) != self.n or self.n < 1:
            raise InputError(f"n must be a positive integer, got {self.n}")
        if self.restarts < 1:
            raise InputError("restarts must be >= 1")
        if self.budget < 100:
            raise InputError("budget must be >= 100 evaluations")
        if not (self.tau_initial > self.tau_floor > 0):
            raise InputError("need tau_initial > tau_floor > 0")
        if not (0 < self.tau_decay < 1):
            raise InputError("tau_decay must lie in (0, 1)")
        if self.field not in ("real", "complex"):
            raise InputError(f"field must be 'real' or 'complex', got {self.field!r}")
        return self


@dataclass
class SearchResult:
    best_A: np.ndarray
    f_best: float
    c_empirical: float
    evaluations: int
    trace: list
    config: SearchConfig
    smoothing_violations: int = 0

    def as_dict(self):
        A = self.best_A
        return {
            "n": self.config.n,
            "f_best": self.f_best,
            "c_empirical": self.c_empirical,
            "evaluations": self.evaluations,
            "smoothing_violations": self.smoothing_violations,
            "trace": [dict(t) for t in self.trace],
            "config": asdict(self.config),
            "best_A": {
                "rows": int(A.shape[0]),
                "cols": int(A.shape[1]),
                "entries": [[float(z.real), float(z.imag)] for z in np.asarray(A, dtype=complex).ravel()],
            },
        }


# ---------------------------------------------------------------- seeds


def character_matrix(n, field="complex"):
    """Unitary DFT matrix; for the real field its orthogonal DCT-II counterpart."""
    j = np.arange(n)
    if field == "complex":
        return np.exp(2j * np.pi * np.outer(j, j) / n) / math.sqrt(n)
    C = np.cos(np.pi * np.outer(j, 2 * j + 1) / (2 * n)) * math.sqrt(2.0 / n)
    C[0] /= math.sqrt(2.0)
    return C


def salem_matrix(n, field="complex", N=None):
    """Square matrix whose columns are the Salem vectors (a = 1, trig system)
    written in an orthonormal basis of their span; ``f`` of it equals the
    product for the Salem family paired with its dual basis."""
    if N is None:
        N = max(1024, 8 * (n + 1))
    grid = Grid(N)
    if field == "complex":
        h = trig_system(np.arange(1, n + 1), grid)
    else:
        x = grid.points
        vals = math.sqrt(2.0) * np.cos(2 * np.pi * np.outer(np.arange(1, n + 1), x))
        h = OrthonormalSystem(vals.astype(np.complex128), grid, np.arange(1, n + 1))
    V, _, _ = salem_vectors(np.ones(n), h)
    coords = np.sqrt(grid.weight) * V.T
    if field == "real":
        coords = coords.real
    _, R = np.linalg.qr(coords)
    return R


def seed_matrix(restart_id, n, field, rng):
    if restart_id == 0:
        A = np.eye(n)
    elif restart_id == 1:
        A = character_matrix(n, field)
    elif restart_id == 2:
        A = salem_matrix(n, field)
    else:
        A = rng.standard_normal((n, n))
        if field == "complex":
            A = A + 1j * rng.standard_normal((n, n))
    return np.asarray(A, dtype=np.complex128 if field == "complex" else np.float64)


# ---------------------------------------------------------------- evaluation


class _Evaluator:
    """Parameter vector -> normalized matrix -> (exact f, smoothed f), with budget
    accounting and per-evaluation monitoring."""

    def __init__(self, n, field, budget, monitor=None):
        self.n = n
        self.field = field
        self.budget = budget
        self.monitor = monitor
        self.count = 0
        self.best_f = math.inf
        self.best_x = None
        self.smoothing_violations = 0
        self.pen = penalty(n)

    @property
    def exhausted(self):
        return self.count >= self.budget

    def to_matrix(self, x):
        n = self.n
        if self.field == "complex":
            A = (x[: n * n] + 1j * x[n * n:]).reshape(n, n)
        else:
            A = x.reshape(n, n)
        fro = math.sqrt(float(np.sum(np.abs(A) ** 2)))
        if not fro > 0 or not math.isfinite(fro):
            return None
        return A * (n / fro)

    def to_params(self, A):
        A = np.asarray(A)
        if self.field == "complex":
            A = A.astype(np.complex128)
            return np.concatenate([A.real.ravel(), A.imag.ravel()])
        return np.asarray(A.real, dtype=np.float64).ravel().copy()

    def __call__(self, x, tau=None):
        if self.count >= self.budget:
            return math.inf, math.inf
        self.count += 1
        A = self.to_matrix(x)
        if A is None:
            return self.pen, self.pen
        rows, partial, ok = kernels.objective_terms(np.ascontiguousarray(A))
        if not ok or not np.all(np.isfinite(rows)):
            return self.pen, self.pen
        f = float(rows.max() * partial.max())
        if not math.isfinite(f):
            return self.pen, self.pen
        if self.monitor is not None:
            self.monitor(self.n, f)
        if f < self.best_f:
            self.best_f = f
            self.best_x = np.array(x, copy=True)
        if tau is None:
            return f, f
        smooth = soft_max(rows, tau) * soft_max(partial, tau)
        if smooth < f * (1 - 1e-12):
            self.smoothing_violations += 1
        return f, smooth


# ---------------------------------------------------------------- simplex descent


def _nelder_mead(fun, x0, step, evaluator, on_accept=None, refresh=None, ftol=1e-13, xtol=1e-11):
    """Adaptive Nelder-Mead (dimension-dependent coefficients).

    ``fun(x) -> value``. ``on_accept()`` runs after every iteration that
    replaced the worst vertex; if it returns True the whole simplex is
    re-evaluated through ``refresh`` (used when the smoothing temperature moved).
    Stops when the evaluator's budget is exhausted or the simplex collapses.
    """
    d = x0.size
    alpha, gamma = 1.0, 1.0 + 2.0 / d
    rho, shrink = 0.75 - 1.0 / (2.0 * d), 1.0 - 1.0 / d
    if d == 1:
        rho, shrink = 0.5, 0.5
    simplex = np.empty((d + 1, d))
    simplex[0] = x0
    for i in range(d):
        simplex[i + 1] = x0
        simplex[i + 1, i] += step
    values = np.empty(d + 1)
    for i in range(d + 1):
        if evaluator.exhausted and i > 0:
            values[i:] = np.inf
            break
        values[i] = fun(simplex[i])

    while not evaluator.exhausted:
        order = np.argsort(values, kind="stable")
        simplex, values = simplex[order], values[order]
        spread = values[-1] - values[0]
        size = np.max(np.abs(simplex[1:] - simplex[0]))
        if spread <= ftol * max(abs(values[0]), 1.0) and size <= xtol * max(1.0, np.max(np.abs(simplex[0]))):
            break
        centroid = simplex[:-1].mean(axis=0)
        worst = simplex[-1]
        xr = centroid + alpha * (centroid - worst)
        fr = fun(xr)
        accepted = True
        if fr < values[0]:
            xe = centroid + gamma * (xr - centroid)
            fe = fun(xe) if not evaluator.exhausted else np.inf
            if fe < fr:
                simplex[-1], values[-1] = xe, fe
            else:
                simplex[-1], values[-1] = xr, fr
        elif fr < values[-2]:
            simplex[-1], values[-1] = xr, fr
        else:
            if fr < values[-1]:
                xc = centroid + rho * (xr - centroid)
            else:
                xc = centroid + rho * (worst - centroid)
            fc = fun(xc) if not evaluator.exhausted else np.inf
            if fc < min(fr, values[-1]):
                simplex[-1], values[-1] = xc, fc
            else:
                accepted = False
                for i in range(1, d + 1):
                    if evaluator.exhausted:
                        break
                    simplex[i] = simplex[0] + shrink * (simplex[i] - simplex[0])
                    values[i] = fun(simplex[i])
        if accepted and on_accept is not None and on_accept():
            for i in range(d + 1):
                if evaluator.exhausted:
                    break
                values[i] = refresh(simplex[i])
    best = int(np.argmin(values))
    return simplex[best], values[best]


def _run_restart(config, restart_id, monitor):
    ss = np.random.SeedSequence([int(config.seed), int(restart_id)])
    restart_seed = int(ss.generate_state(1, dtype=np.uint64)[0])
    rng = np.random.Generator(np.random.PCG64(ss))
    n = config.n
    ev = _Evaluator(n, config.field, config.budget, monitor)
    A0 = seed_matrix(restart_id, n, config.field, rng)
    x0 = ev.to_params(A0 * (n / max(np.linalg.norm(A0), 1e-300)))
    ev(x0)

    # smoothed phase: temperature decays on every accepted step down to the floor
    state = {"tau": config.tau_initial, "refreshed_at": config.tau_initial}

    def smoothed(x):
        return ev(x, state["tau"])[1]

    def on_accept():
        if state["tau"] <= config.tau_floor:
            return False
        state["tau"] = max(config.tau_floor, state["tau"] * config.tau_decay)
        if state["tau"] <= 0.5 * state["refreshed_at"] or state["tau"] == config.tau_floor:
            state["refreshed_at"] = state["tau"]
            return True
        return False

    class _Floor(Exception):
        pass

    def smoothed_until_floor(x):
        if state["tau"] <= config.tau_floor and state["refreshed_at"] == config.tau_floor:
            raise _Floor
        return smoothed(x)

    step = 0.2
    try:
        _nelder_mead(smoothed_until_floor, x0, step, ev, on_accept=on_accept, refresh=smoothed)
    except _Floor:
        pass

    # exact polish from the best point seen, restarting the simplex while budget remains
    exact = lambda x: ev(x)[0]
    step = 0.05
    while not ev.exhausted and ev.best_x is not None:
        before = ev.best_f
        start = ev.to_params(ev.to_matrix(ev.best_x))
        _nelder_mead(exact, start, step, ev)
        if ev.best_f >= before * (1 - 1e-12):
            step *= 0.5
            if step < 1e-9:
                break
    best_A = ev.to_matrix(ev.best_x) if ev.best_x is not None else None
    return {
        "restart_id": restart_id,
        "seed": restart_seed,
        "f": ev.best_f if ev.best_x is not None else penalty(n),
        "evaluations": ev.count,
        "smoothing_violations": ev.smoothing_violations,
        "A": best_A,
    }


def search(config, monitor=None, workers=None):
    """Multi-restart minimization of ``f``; deterministic for a given config.

    Restart ``r`` starts from: the identity (r=0), the character matrix (r=1),
    the Salem matrix (r=2), a Gaussian matrix (r>=3), with its own generator
    seeded by ``(seed, r)``. ``monitor(n, f)`` is called for every evaluated
    matrix. Restarts run on up to ``workers`` threads (``BIORTH_THREADS``).
    """
    config.validate()
    if workers is None:
        workers = default_workers()
    workers = max(1, min(int(workers), config.restarts))
    ids = list(range(config.restarts))
    if workers == 1:
        results = [_run_restart(config, r, monitor) for r in ids]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda r: _run_restart(config, r, monitor), ids))
    results.sort(key=lambda r: r["restart_id"])
    trace = [{"restart_id": r["restart_id"], "seed": r["seed"], "f": r["f"]} for r in results]
    pen = penalty(config.n)
    live = [r for r in results if r["A"] is not None and r["f"] < pen]
    if not live:
        raise SearchFailure("every restart ended in the singular-penalty region", trace)
    best = min(live, key=lambda r: (r["f"], r["restart_id"]))
    f_best = best["f"]
    c_emp = math.log(config.n) / f_best if config.n > 1 else 0.0
    return SearchResult(
        best_A=best["A"],
        f_best=f_best,
        c_empirical=c_emp,
        evaluations=sum(r["evaluations"] for r in results),
        trace=trace,
        config=config,
        smoothing_violations=sum(r["smoothing_violations"] for r in results),
    )


# ---------------------------------------------------------------- brute-force oracle


def _batch_objective(R):
    """``f`` for a stack of matrices using numpy's inverse (independent of the LU kernel)."""
    inv = np.linalg.inv(R)
    rows = np.sqrt((np.abs(inv) ** 2).sum(axis=2)).max(axis=1)
    partial = np.sqrt((np.abs(np.cumsum(R, axis=2)) ** 2).sum(axis=1)).max(axis=1)
    return rows * partial


def _triangular_stack(n, params):
    """Upper-triangular matrices with ``R[0, 0] = 1`` from rows of free parameters.

    Parameters are listed column by column: for column ``j`` the ``j``
    off-diagonal entries, then the (positive) diagonal entry.
    """
    K = params.shape[0]
    R = np.zeros((K, n, n))
    R[:, 0, 0] = 1.0
    col = 0
    for j in range(1, n):
        for i in range(j):
            R[:, i, j] = params[:, col]
            col += 1
        R[:, j, j] = params[:, col]
        col += 1
    return R


def small_n_oracle(n, resolution=64, rounds=12, half_width=2.0):
    """Minimum of ``f`` over real ``n x n`` matrices by exhaustive grid search.

    By QR and the invariances, every real invertible matrix has the same ``f``
    as an upper-triangular ``R`` with positive diagonal and ``R[0, 0] = 1``.
    The free entries are scanned on a ``resolution``-point grid per axis
    (off-diagonals in ``[-half_width, half_width]``, diagonals in
    ``(0, half_width]``), then the box is repeatedly shrunk around the best
    point and rescanned until the minimum is stable to 1e-6 relative.
    """
    if n not in (1, 2, 3):
        raise UnsupportedError(f"brute-force oracle supports n in {{1, 2, 3}}, got {n}")
    if n == 1:
        return 1.0
    npar = n * (n + 1) // 2 - 1
    diag = []
    col = 0
    for j in range(1, n):
        col += j
        diag.append(col)
        col += 1
    lo = np.full(npar, -half_width)
    hi = np.full(npar, half_width)
    lo[diag] = half_width / resolution
    hi[diag] = half_width
    res = resolution if npar <= 2 else max(6, min(resolution // 4, 14))
    best_f, best_p = math.inf, None
    prev = math.inf
    for _ in range(rounds):
        axes = [np.linspace(lo[k], hi[k], res) for k in range(npar)]
        mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, npar)
        for chunk in np.array_split(mesh, max(1, mesh.shape[0] // 200000)):
            vals = _batch_objective(_triangular_stack(n, chunk))
            k = int(np.argmin(vals))
            if vals[k] < best_f:
                best_f, best_p = float(vals[k]), chunk[k].copy()
        if abs(prev - best_f) <= 1e-6 * best_f:
            break
        prev = best_f
        width = (hi - lo) / (res - 1) * 2.0
        lo = best_p - width
        hi = best_p + width
        lo[diag] = np.maximum(lo[diag], 1e-9)
    return best_f


_ORACLE_CACHE = {}


def theorem_cap(oracle_value=None, headroom=2.0):
    """``headroom * ln 2 / f*(2)`` with ``f*(2)`` from the brute-force oracle."""
    if oracle_value is None:
        if 2 not in _ORACLE_CACHE:
            _ORACLE_CACHE[2] = small_n_oracle(2)
        oracle_value = _ORACLE_CACHE[2]
    return headroom * math.log(2) / oracle_value


@dataclass
class FloorAudit:
    """Collects ``ln n / f`` over evaluated matrices and flags those above ``cap``.

    All violations are counted; the ``max_recorded`` largest are kept.
    """

    cap: float
    count: int = 0
    max_ratio: float = 0.0
    max_ratio_n: int = 0
    n_violations: int = 0
    violations: list = field(default_factory=list)
    max_recorded: int = 1000

    def __post_init__(self):
        self._lock = threading.Lock()

    def observe(self, n, f, source=""):
        if n < 2 or not (f > 0) or not math.isfinite(f):
            return
        ratio = math.log(n) / f
        with self._lock:
            self.count += 1
            if ratio > self.max_ratio:
                self.max_ratio, self.max_ratio_n = ratio, n
            if ratio > self.cap:
                self.n_violations += 1
                # keep the largest ratios: min-heap keyed by ratio, tie-broken by arrival
                entry = (ratio, self.n_violations, {"n": n, "f": f, "ratio": ratio, "source": source})
                if len(self.violations) < self.max_recorded:
                    heapq.heappush(self.violations, entry)
                elif ratio > self.violations[0][0]:
                    heapq.heapreplace(self.violations, entry)

    def observe_matrix(self, A, source=""):
        try:
            f = objective(A)
        except np.linalg.LinAlgError:
            return None
        self.observe(np.asarray(A).shape[0], f, source)
        return f

    def monitor(self, source):
        return lambda n, f: self.observe(n, f, source)

    def summary(self):
        return {
            "cap": self.cap,
            "evaluated": self.count,
            "max_ratio": self.max_ratio,
            "max_ratio_n": self.max_ratio_n,
            "violations": self.n_violations,
            "worst": [e[2] for e in sorted(self.violations, key=lambda e: (-e[0], e[1]))[:10]],
        }


def ensemble(kind, n, rng):
    """Test matrices: ``gaussian``, ``unitary``, ``triangular`` or ``hilbert``
    (Hilbert matrix plus identity, which keeps it well conditioned)."""
    if kind == "gaussian":
        return rng.standard_normal((n, n))
    if kind == "unitary":
        return random_unitary(n, rng)
    if kind == "triangular":
        T = np.triu(rng.standard_normal((n, n)))
        np.fill_diagonal(T, np.abs(np.diag(T)) + 0.5)
        return T
    if kind == "hilbert":
        i = np.arange(n)
        return 1.0 / (i[:, None] + i[None, :] + 1.0) + np.eye(n)
    raise InputError(f"unknown ensemble {kind!r}")


ENSEMBLES = ("gaussian", "unitary", "triangular", "hilbert")


def constant_table(ns, config, monitor=None, workers=None):
    """Rows ``(n, f_best, ln_n, c_empirical)`` sorted by ``n``; ``n = 1`` is skipped."""
    rows = []
    for n in sorted(set(int(n) for n in ns)):
        if n < 2:
            warnings.warn(f"n = {n} excluded from the constant table (ln 1 = 0)", stacklevel=2)
            continue
        result = search(replace(config, n=n), monitor=monitor, workers=workers)
        rows.append(
            {"n": n, "f_best": result.f_best, "ln_n": math.log(n), "c_empirical": result.c_empirical}
        )
    return rows
