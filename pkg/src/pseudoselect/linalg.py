"""Dense symmetric-positive-definite linear algebra.

Just the three operations the logistic learner and the selection
criteria need: Cholesky factorization, log-determinant, and linear
solves against the factor. Matrices here are small (the parameter
dimension); factorization is unpivoted (LAPACK-backed) with a pivot
floor so degenerate information matrices fail with a typed error
instead of propagating NaNs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve

from .exceptions import DimensionMismatchError, NotPositiveDefiniteError

# Pivots at or below this are treated as a positive-definiteness failure.
# Near-zero pivots arise from degenerate information matrices (e.g.
# separable data with zero prior precision) and must surface as a typed
# error rather than NaN propagation.
PIVOT_TOL = 1e-12


@dataclass(frozen=True)
class SpdMatrix:
    """Square symmetric matrix container.

    Symmetry is enforced exactly as stored; positive definiteness is a
    property of the values and is only checked when factorizing.
    """

    values: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.values, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise DimensionMismatchError(f"expected a square matrix, got shape {a.shape}")
        if not np.array_equal(a, a.T):
            raise DimensionMismatchError("matrix is not symmetric as stored")
        object.__setattr__(self, "values", a)

    @property
    def dim(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class CholeskyFactor:
    """Lower-triangular factor L with LL^T equal to the source matrix.

    All diagonal entries are strictly positive by construction.
    """

    lower: np.ndarray

    @property
    def dim(self) -> int:
        return self.lower.shape[0]


def _cholesky_lower(a: np.ndarray) -> np.ndarray:
    """Unpivoted Cholesky on a raw array; hot path for the learner.

    Backed by LAPACK; the pivot tolerance is enforced on the factor
    diagonal (pivots are the squared diagonal entries), so matrices that
    factor but carry a pivot at or below PIVOT_TOL still fail typed.
    """
    try:
        lower = np.linalg.cholesky(a)
    except np.linalg.LinAlgError as err:
        raise NotPositiveDefiniteError(
            f"matrix is not positive definite: {err}"
        ) from None
    smallest = float(np.min(np.diag(lower)))
    if smallest * smallest <= PIVOT_TOL:
        raise NotPositiveDefiniteError(
            f"pivot {smallest * smallest:.3e} is <= {PIVOT_TOL:g}; "
            "matrix is not numerically positive definite"
        )
    return lower


def cholesky(a: SpdMatrix) -> CholeskyFactor:
    """Factor a as LL^T.

    Raises NotPositiveDefiniteError when any pivot falls at or below
    PIVOT_TOL.
    """
    return CholeskyFactor(_cholesky_lower(a.values))


def log_det_spd(factor: CholeskyFactor) -> float:
    """Log-determinant of the factored matrix, 2 * sum(log diag(L))."""
    return 2.0 * float(np.sum(np.log(np.diag(factor.lower))))


def _solve_from_lower(lower: np.ndarray, b: np.ndarray) -> np.ndarray:
    # forward then backward substitution against the lower factor
    return cho_solve((lower, True), b, check_finite=False)


def solve_spd(factor: CholeskyFactor, b: np.ndarray) -> np.ndarray:
    """Solve A x = b using the Cholesky factor of A."""
    b = np.asarray(b, dtype=float)
    if b.ndim != 1 or b.shape[0] != factor.dim:
        raise DimensionMismatchError(
            f"right-hand side has length {b.shape}, factor dimension is {factor.dim}"
        )
    return _solve_from_lower(factor.lower, b)
