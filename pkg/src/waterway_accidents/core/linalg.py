"""
Dense matrix arithmetic and linear-system solving for normal equations.

Small systems only (at most 16 predictors plus the intercept). Solving uses
LU factorization with partial (row) pivoting, so the i-th pivot belongs to
the i-th column and a breakdown can be reported by column index.
"""

import warnings

import numpy as np
import scipy.linalg
from numpy.typing import ArrayLike, NDArray

from waterway_accidents.core.logging import get_logger

logger = get_logger("linalg")

Matrix = NDArray[np.float64]
RealVector = NDArray[np.float64]

PIVOT_TOLERANCE = 1e-12  # relative to the largest row norm


class LinAlgError(ValueError):
    """Base class for dense linear-algebra failures."""


class ShapeError(LinAlgError):
    """Raised when operand dimensions do not conform."""


class SingularSystemError(LinAlgError):
    """Raised when a system is singular or numerically rank-deficient.

    Attributes:
        pivot_index: Column at which elimination found a negligible pivot.
    """

    def __init__(self, pivot_index: int) -> None:
        self.pivot_index = pivot_index
        super().__init__(f"singular system: negligible pivot at index {pivot_index}")


def as_matrix(values: ArrayLike) -> Matrix:
    """Coerce ``values`` to a finite 2-D float array.

    Raises:
        ShapeError: If the input is not two-dimensional or is empty.
        LinAlgError: If any entry is not finite.
    """
    array = np.asarray(values, dtype=float)
    if array.ndim != 2 or array.shape[0] < 1 or array.shape[1] < 1:
        raise ShapeError(f"expected a non-empty 2-D matrix, got shape {array.shape}")
    if not np.all(np.isfinite(array)):
        raise LinAlgError("matrix entries must be finite")
    return array


def as_vector(values: ArrayLike) -> RealVector:
    """Coerce ``values`` to a finite 1-D float array of length >= 1."""
    array = np.asarray(values, dtype=float)
    if array.ndim != 1 or array.shape[0] < 1:
        raise ShapeError(f"expected a non-empty vector, got shape {array.shape}")
    if not np.all(np.isfinite(array)):
        raise LinAlgError("vector entries must be finite")
    return array


def matmul(a: ArrayLike, b: ArrayLike) -> Matrix:
    """Multiply two matrices.

    Args:
        a: Left operand, m x p.
        b: Right operand, p x q.

    Returns:
        The m x q product.

    Raises:
        ShapeError: If ``a.cols != b.rows``.

    Example:
        >>> matmul([[1, 2], [3, 4]], [[1], [1]])
        array([[3.],
               [7.]])
    """
    left, right = as_matrix(a), as_matrix(b)
    if left.shape[1] != right.shape[0]:
        raise ShapeError(f"cannot multiply {left.shape} by {right.shape}")
    return left @ right


def solve_linear_system(a: ArrayLike, rhs: ArrayLike) -> RealVector:
    """Solve ``a @ x = rhs`` for square ``a``.

    A pivot smaller than ``PIVOT_TOLERANCE`` times the largest absolute row sum
    of ``a`` marks the system as rank-deficient.

    Args:
        a: Square n x n coefficient matrix.
        rhs: Right-hand side of length n.

    Returns:
        The solution vector.

    Raises:
        ShapeError: If ``a`` is not square or ``rhs`` has the wrong length.
        SingularSystemError: If a pivot is negligible; carries its index.
    """
    matrix = as_matrix(a)
    vector = as_vector(rhs)
    n = matrix.shape[0]
    if matrix.shape[1] != n:
        raise ShapeError(f"coefficient matrix must be square, got {matrix.shape}")
    if vector.shape[0] != n:
        raise ShapeError(f"right-hand side has length {vector.shape[0]}, expected {n}")

    row_norm = np.linalg.norm(matrix, ord=np.inf)
    if row_norm == 0.0:
        raise SingularSystemError(0)

    with warnings.catch_warnings():
        # exact zero pivots are reported below with their index
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(matrix, check_finite=False)

    negligible = np.flatnonzero(np.abs(np.diag(lu)) < PIVOT_TOLERANCE * row_norm)
    if negligible.size:
        pivot = int(negligible[0])
        logger.debug("Negligible pivot", pivot_index=pivot, size=n)
        raise SingularSystemError(pivot)

    return scipy.linalg.lu_solve((lu, piv), vector, check_finite=False)
