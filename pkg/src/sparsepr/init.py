"""Two-step spectral initialization.

First the support is guessed from the weighted column energies
``(1/m) sum_i y_i^2 a_ij^2``, whose expectation is
``(||x||^2 + 2 x_j^2) / m``; then the signal on that support is the principal
eigenvector of ``(1/m) sum_i y_i^2 a_iS a_iS^T``, rescaled to length
``||y||``.

Both weighted sums are written at raw (unscaled) measurement scale. With the
ensemble storing ``A = raw / sqrt(m)`` and ``y = y_raw / sqrt(m)`` each raw
sum is ``m`` times its scaled counterpart.
"""
from dataclasses import dataclass

import numpy as np

from .linalg import principal_eigenvector

__all__ = ["InitReport", "support_scores", "estimate_support", "spectral_init"]


@dataclass(frozen=True)
class InitReport:
    estimated_support: np.ndarray
    x0: np.ndarray
    eigen_converged: bool
    eigenvalue: float


def top_indices(values, k):
    """Indices of the ``k`` largest entries, ties to the lowest index, sorted."""
    order = np.argsort(-values, kind="stable")
    return np.sort(order[:k])


def support_scores(ensemble):
    m = ensemble.m
    y2 = ensemble.y_observed ** 2
    return m * (y2 @ ensemble.A ** 2)


def estimate_support(ensemble, s):
    if not 0 <= s <= ensemble.n:
        raise ValueError(f"need 0 <= s <= n, got s={s}, n={ensemble.n}")
    return top_indices(support_scores(ensemble), s)


def spectral_init(ensemble, s, rng, tol=1e-6, max_iter=1000):
    """Initial guess ``x0`` supported on the estimated support.

    The eigenvector's global sign is not identifiable; it is fixed so that
    its largest-magnitude entry is positive.
    """
    if s > min(ensemble.m, ensemble.n):
        raise ValueError(f"need s <= min(m, n), got s={s}")
    S = estimate_support(ensemble, s)
    m, n = ensemble.m, ensemble.n
    x0 = np.zeros(n)
    if S.size == 0:
        return InitReport(S, x0, True, 0.0)

    As = ensemble.A[:, S]
    weights = m * ensemble.y_observed ** 2
    M = As.T @ (weights[:, None] * As)
    eig = principal_eigenvector(M, tol=tol, max_iter=max_iter, seed=int(rng.integers(2**63)))
    v = eig.vector
    if v[np.argmax(np.abs(v))] < 0:
        v = -v
    x0[S] = np.linalg.norm(ensemble.y_observed) * v
    return InitReport(S, x0, eig.converged, eig.value)
