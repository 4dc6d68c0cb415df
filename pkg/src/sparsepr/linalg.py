"""Dense kernels shared by the solvers.

Matrices and vectors are plain float64 numpy arrays; the ``as_*`` helpers
validate shape and finiteness at the boundaries where user data enters.
"""
from dataclasses import dataclass

import numpy as np
from scipy.linalg import lapack, solve_triangular

__all__ = [
    "SingularSystemError",
    "EigenResult",
    "as_matrix",
    "as_vector",
    "as_support",
    "matvec",
    "transpose_matvec",
    "restricted_least_squares",
    "principal_eigenvector",
]

PIVOT_TOL = 1e-12


class SingularSystemError(np.linalg.LinAlgError):
    """Restricted Gram matrix is numerically rank deficient.

    ``pivot`` is the position (within the support) of the first Cholesky
    pivot that fell below tolerance.
    """

    def __init__(self, pivot, value):
        super().__init__(f"restricted Gram matrix is singular: pivot {pivot} = {value:.3e}")
        self.pivot = pivot
        self.value = value


def as_matrix(a):
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def as_vector(v, length=None):
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1:
        raise ValueError(f"expected a 1-D vector, got shape {v.shape}")
    if length is not None and v.shape[0] != length:
        raise ValueError(f"expected length {length}, got {v.shape[0]}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector has non-finite entries")
    return v


def as_support(indices, n, budget=None):
    """Sorted, duplicate-free index array with every entry in ``[0, n)``."""
    idx = np.asarray(indices, dtype=np.intp).ravel()
    if idx.size and (idx.min() < 0 or idx.max() >= n):
        raise ValueError(f"support indices must lie in [0, {n})")
    out = np.unique(idx)
    if out.size != idx.size:
        raise ValueError("support indices must be unique")
    if budget is not None and out.size > budget:
        raise ValueError(f"support has {out.size} indices, budget is {budget}")
    return out


def matvec(A, x):
    if A.shape[1] != x.shape[0]:
        raise ValueError(f"dimension mismatch: A is {A.shape}, x has length {x.shape[0]}")
    return A @ x


def transpose_matvec(A, v):
    if A.shape[0] != v.shape[0]:
        raise ValueError(f"dimension mismatch: A is {A.shape}, v has length {v.shape[0]}")
    return A.T @ v


def restricted_least_squares(A, b, support):
    """Least squares over vectors supported on ``support``.

    Solves the normal equation ``A_S^T A_S x_S = A_S^T b`` by Cholesky and
    returns the full-length solution, zero off the support. Costs
    ``O(|S|^2 m)``.

    Raises
    ------
    SingularSystemError
        If a Cholesky pivot of the Gram matrix is below ``PIVOT_TOL`` times
        its largest diagonal entry.
    """
    support = np.asarray(support, dtype=np.intp)
    m, n = A.shape
    if b.shape[0] != m:
        raise ValueError(f"dimension mismatch: A is {A.shape}, b has length {b.shape[0]}")
    if support.size > m:
        raise ValueError(f"support size {support.size} exceeds number of rows {m}")
    x = np.zeros(n)
    if support.size == 0:
        return x
    As = A[:, support]
    gram = As.T @ As
    rhs = As.T @ b

    factor, info = lapack.dpotrf(gram, lower=True, clean=True)
    scale = max(float(np.max(np.diag(gram))), np.finfo(float).tiny)
    if info > 0:
        # dpotrf stops at the first nonpositive leading minor (1-based)
        raise SingularSystemError(info - 1, 0.0)
    pivots = np.diag(factor) ** 2
    bad = np.flatnonzero(pivots <= PIVOT_TOL * scale)
    if bad.size:
        raise SingularSystemError(int(bad[0]), float(pivots[bad[0]]))

    w = solve_triangular(factor, rhs, lower=True)
    x[support] = solve_triangular(factor, w, lower=True, trans="T")
    return x


@dataclass(frozen=True)
class EigenResult:
    vector: np.ndarray
    value: float
    converged: bool
    iterations: int


def principal_eigenvector(M, tol=1e-6, max_iter=1000, seed=0):
    """Top eigenpair of a symmetric matrix by power iteration.

    The start vector is drawn from ``seed``. Power iteration finds the
    eigenvalue of largest magnitude; if that one is negative the iteration
    is rerun on the shifted matrix ``M - lam I`` (positive semidefinite),
    so the result is always the algebraically largest eigenvalue.

    Non-convergence is reported through ``EigenResult.converged`` and the
    best available pair is still returned.
    """
    M = as_matrix(M)
    if M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    M = 0.5 * (M + M.T)
    rng = np.random.default_rng(seed)
    v0 = rng.standard_normal(M.shape[0])
    v0 /= np.linalg.norm(v0)

    v, lam, ok, its = _power_iterate(M, v0, tol, max_iter)
    if lam < 0.0:
        v, lam, ok, more = _power_iterate(M, v0, tol, max_iter, shift=lam)
        its += more
    return EigenResult(vector=v, value=lam, converged=bool(ok), iterations=its)


def _power_iterate(M, v, tol, max_iter, shift=0.0):
    """Power iteration on ``M - shift I``; convergence is judged on ``M``."""
    lam = float(v @ M @ v)
    for it in range(1, max_iter + 1):
        w = M @ v - shift * v
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return v, lam, True, it
        v = w / nw
        Mv = M @ v
        lam = float(v @ Mv)
        if np.linalg.norm(Mv - lam * v) <= tol * abs(lam):
            return v, lam, True, it
    return v, lam, False, max_iter
