"""Exception hierarchy.

Everything raised on purpose by the package derives from :class:`BiorthError`.
The CLI maps :class:`Finding` subclasses to exit code 1 (a mathematical
statement failed) and every other :class:`BiorthError` to exit code 2.
"""

import numpy as np


class BiorthError(Exception):
    pass


class InputError(BiorthError, ValueError):
    """Malformed or inconsistent input (shapes, preconditions, file contents)."""


class ResolutionError(InputError):
    """Grid too coarse for the requested frequencies."""


class DegenerateInputError(InputError):
    pass


class UnsupportedError(InputError):
    pass


class SingularityError(BiorthError, np.linalg.LinAlgError):
    """Factorization broke down or the condition estimate exceeded the cap.

    ``pivot`` is the zero-based index of the offending pivot, or ``None`` when
    the failure came from the condition cap.
    """

    def __init__(self, message, pivot=None, condition=None):
        super().__init__(message)
        self.pivot = pivot
        self.condition = condition


class SingularMatrixError(SingularityError):
    pass


class LinearDependenceError(SingularityError):
    pass


class InternalConsistencyError(BiorthError, AssertionError):
    """A structural identity failed; this signals a bug, not a math failure."""


class SearchFailure(BiorthError, RuntimeError):
    def __init__(self, message, trace=()):
        super().__init__(message)
        self.trace = list(trace)


class Finding(BiorthError):
    """A checked inequality or certification did not hold."""


class CertificationError(Finding):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual
