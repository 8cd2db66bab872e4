"""Euclidean arithmetic on H = R^n and on the product space X = H^m.

A point of H is a 1-D float array of length ``n``. A point of X is a 2-D
array of shape ``(m, n)`` whose rows are the blocks ``x_1, ..., x_m``.
Matrices are plain 2-D arrays.
"""

import numpy as np
import scipy.linalg

from .config import DEFAULT_TOL
from .exceptions import DimensionError, SolverError


def as_vector(x, n=None):
    """Return ``x`` as a finite 1-D float array, optionally of length ``n``."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        x = x.reshape(1)
    if x.ndim != 1:
        raise DimensionError(f"expected a vector, got shape {x.shape}")
    if n is not None and x.shape[0] != n:
        raise DimensionError(f"expected length {n}, got {x.shape[0]}")
    if not np.all(np.isfinite(x)):
        raise DimensionError("vector entries must be finite")
    return x


def as_product(x, m=None, n=None):
    """Return ``x`` as an ``(m, n)`` float array of blocks.

    A flat sequence of length ``m`` is accepted when ``n == 1``.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim == 1 and n == 1:
        x = x.reshape(-1, 1)
    if x.ndim != 2:
        raise DimensionError(f"expected an (m, n) array of blocks, got shape {x.shape}")
    if (m is not None and x.shape[0] != m) or (n is not None and x.shape[1] != n):
        raise DimensionError(f"expected shape ({m}, {n}), got {x.shape}")
    if not np.all(np.isfinite(x)):
        raise DimensionError("entries must be finite")
    return x


def inner_product(u, v):
    """Sum of entrywise products of two equally shaped points."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise DimensionError(f"shape mismatch: {u.shape} vs {v.shape}")
    return float(np.vdot(u, v))


def norm(u):
    """Euclidean norm over all blocks and coordinates."""
    return float(np.linalg.norm(np.ravel(np.asarray(u, dtype=float))))


def _check_square(M):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {M.shape}")
    return M


def _check_condition(M, max_condition):
    cond = np.linalg.cond(M) if M.size else 1.0
    if not np.isfinite(cond) or cond > max_condition:
        raise SolverError(
            f"matrix is singular or ill-conditioned (condition estimate {cond:.3e}, "
            f"limit {max_condition:.1e})"
        )
    return cond


def solve_dense(M, b, tol=DEFAULT_TOL):
    """Solve ``M x = b`` for a small, well-conditioned square matrix.

    Parameters
    ----------
    M : (k, k) array_like
    b : (k,) array_like
    tol : Tolerances
        ``tol.max_condition`` bounds the accepted condition number and
        ``tol.lin`` the relative residual ``||Mx - b|| / (1 + ||b||)``.

    Returns
    -------
    x : (k,) ndarray

    Raises
    ------
    SolverError
        If ``M`` is numerically singular or the residual cannot be brought
        below the tolerance.
    """
    M = _check_square(M)
    b = as_vector(b, M.shape[0])
    cond = _check_condition(M, tol.max_condition)
    lu = scipy.linalg.lu_factor(M, check_finite=False)
    x = scipy.linalg.lu_solve(lu, b, check_finite=False)
    bound = tol.lin * (1.0 + np.linalg.norm(b))
    r = b - M @ x
    if np.linalg.norm(r) > bound:
        # one step of iterative refinement
        x = x + scipy.linalg.lu_solve(lu, r, check_finite=False)
        r = b - M @ x
        if np.linalg.norm(r) > bound:
            raise SolverError(
                f"residual {np.linalg.norm(r):.3e} exceeds {bound:.3e} "
                f"(condition estimate {cond:.3e})"
            )
    return x


class LinearSolver:
    """LU factorization of a fixed square matrix, reused across solves."""

    def __init__(self, M, tol=DEFAULT_TOL):
        self.matrix = _check_square(M)
        self.condition = _check_condition(self.matrix, tol.max_condition)
        self._lu = scipy.linalg.lu_factor(self.matrix, check_finite=False)

    def solve(self, b):
        return scipy.linalg.lu_solve(self._lu, np.asarray(b, dtype=float), check_finite=False)
