"""Bi-orthogonal systems, the partial-sum inequality and its numerical checks."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    BiorthError,
    CertificationError,
    DegenerateInputError,
    Finding,
    InputError,
    InternalConsistencyError,
    LinearDependenceError,
    ResolutionError,
    SearchFailure,
    SingularityError,
    SingularMatrixError,
    UnsupportedError,
)
from .pairs import BiorthogonalPair, certify, dual_basis, inequality_functional, matrix_pair  # noqa: E402

__all__ = [
    "BiorthError",
    "BiorthogonalPair",
    "CertificationError",
    "DegenerateInputError",
    "Finding",
    "InputError",
    "InternalConsistencyError",
    "LinearDependenceError",
    "ResolutionError",
    "SearchFailure",
    "SingularityError",
    "SingularMatrixError",
    "UnsupportedError",
    "certify",
    "dual_basis",
    "inequality_functional",
    "matrix_pair",
]
