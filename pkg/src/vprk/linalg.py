"""Small dense linear algebra: pivoted LU, solves, condition estimate, FD Jacobians.

Matrices are plain 2-D ``numpy.ndarray`` in row-major layout. All stage
systems in this package are tiny (at most a few dozen unknowns), so a
straightforward partial-pivoting LU is plenty.
"""

import warnings

import numpy as np
import scipy.linalg

from .errors import SingularMatrix

# Pivots smaller than this fraction of the largest entry count as singular.
PIVOT_RTOL = 1e-13


def lu_factor(a):
    """Partial-pivoting LU factorization (LAPACK getrf underneath).

    Returns ``(lu, piv)`` in the usual packed layout. Raises SingularMatrix
    when any pivot falls below ``PIVOT_RTOL * max|a|``.
    """
    a = np.array(a, dtype=float)
    m, n = a.shape
    if m != n:
        raise ValueError(f"square matrix required, got {m}x{n}")
    threshold = PIVOT_RTOL * (np.max(np.abs(a)) if a.size else 0.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # LinAlgWarning on exact zero pivots
        lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
    pivots = np.abs(np.diag(lu))
    if np.min(pivots, initial=np.inf) <= threshold:
        k = int(np.argmin(pivots))
        raise SingularMatrix(
            f"pivot {pivots[k]:.3e} below threshold {threshold:.3e} "
            f"at elimination step {k}"
        )
    return lu, piv


def lu_solve_factored(lu, piv, b):
    """Solve with a factorization from :func:`lu_factor`. ``b`` is 1-D or 2-D."""
    return scipy.linalg.lu_solve((lu, piv), np.asarray(b, dtype=float),
                                 check_finite=False)


def lu_solve(a, b):
    """Solve ``a @ x = b`` by partial-pivoting LU.

    Raises SingularMatrix when elimination meets a negligible pivot.
    """
    lu, piv = lu_factor(a)
    return lu_solve_factored(lu, piv, b)


def condition_estimate(a):
    """1-norm condition estimate ``||a||_1 * ||a^-1||_1``; +inf if singular."""
    a = np.asarray(a, dtype=float)
    try:
        lu, piv = lu_factor(a)
    except SingularMatrix:
        return np.inf
    inv = lu_solve_factored(lu, piv, np.eye(a.shape[0]))
    norm = np.abs(a).sum(axis=0).max()
    inv_norm = np.abs(inv).sum(axis=0).max()
    return norm * inv_norm


def fd_jacobian(f, x, eps=None):
    """Central-difference Jacobian of ``f`` at ``x``.

    ``f`` maps an m-vector to a k-vector; the result is k-by-m. The default
    step is ``1e-6 * (1 + ||x||_inf)``.
    """
    x = np.asarray(x, dtype=float)
    if eps is None:
        eps = 1e-6 * (1.0 + np.max(np.abs(x), initial=0.0))
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    cols = []
    for i in range(x.size):
        dx = np.zeros_like(x)
        dx[i] = eps
        cols.append((np.asarray(f(x + dx)) - np.asarray(f(x - dx))) / (2.0 * eps))
    return np.column_stack(cols).astype(float)
