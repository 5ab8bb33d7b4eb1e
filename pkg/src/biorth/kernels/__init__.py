"""Hot loops, dispatched to numba or numpy.

The numba path is used when numba imports and ``BIORTH_DISABLE_JIT`` is unset
or falsy; otherwise the vectorized numpy twins are used. The choice is made
once, at import time. Both implementations stay importable as
``biorth.kernels.numpy_impl`` and (when available) ``biorth.kernels.numba_impl``
so they can be compared directly.
"""

from .._backend import jit_requested, numba_available
from . import _numpy as numpy_impl

if numba_available():
    from . import _numba as numba_impl
else:  # pragma: no cover - numba is a declared dependency
    numba_impl = None

if numba_impl is not None and jit_requested():
    _impl = numba_impl
    BACKEND = "numba"
else:
    _impl = numpy_impl
    BACKEND = "numpy"

cholesky = _impl.cholesky
cholesky_solve = _impl.cholesky_solve
lu_factor = _impl.lu_factor
lu_solve = _impl.lu_solve
lu_solve_adjoint = _impl.lu_solve_adjoint
objective_terms = _impl.objective_terms
running_maximal = _impl.running_maximal
fourier_running_max = _impl.fourier_running_max

__all__ = [
    "BACKEND",
    "cholesky",
    "cholesky_solve",
    "lu_factor",
    "lu_solve",
    "lu_solve_adjoint",
    "objective_terms",
    "running_maximal",
    "fourier_running_max",
    "numpy_impl",
    "numba_impl",
]
