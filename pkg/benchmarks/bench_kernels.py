"""Time the numba kernels against their numpy twins.

    python3 benchmarks/bench_kernels.py --repeat 20 --sizes 8 32 64
"""

import argparse
import time

import numpy as np

from biorth import kernels


def best_time(fn, repeat):
    fn()  # warm-up, includes JIT compilation on first use
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def cases(n, rng):
    X = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    G = X @ X.conj().T + np.eye(n)
    A = rng.standard_normal((n, n))
    N = 64 * n
    terms = np.exp(2j * np.pi * np.outer(np.arange(1, n + 1), np.arange(N)) / N)
    coef = np.zeros(N, dtype=complex)
    coef[: n + 1] = 1
    coef[-n:] = 1
    return {
        "cholesky": lambda impl: impl.cholesky(G),
        "lu_factor": lambda impl: impl.lu_factor(A),
        "objective_terms": lambda impl: impl.objective_terms(A),
        "running_maximal": lambda impl: impl.running_maximal(terms, 1e-12),
        "fourier_running_max": lambda impl: impl.fourier_running_max(coef, n),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=[8, 32, 64])
    parser.add_argument("--repeat", type=int, default=20)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    if kernels.numba_impl is None:
        raise SystemExit("numba is not installed; nothing to compare")
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<22}{'n':>5}{'numpy [ms]':>13}{'numba [ms]':>13}{'speedup':>10}")
    for n in args.sizes:
        for name, call in cases(n, rng).items():
            t_np = best_time(lambda: call(kernels.numpy_impl), args.repeat)
            t_nb = best_time(lambda: call(kernels.numba_impl), args.repeat)
            print(f"{name:<22}{n:>5}{1e3 * t_np:>13.3f}{1e3 * t_nb:>13.3f}{t_np / t_nb:>9.1f}x")


if __name__ == "__main__":
    main()
