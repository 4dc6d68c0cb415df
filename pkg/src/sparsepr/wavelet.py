"""Orthonormal multi-level Haar (db1) transform.

Coefficients are stored coarsest first:
``[approx_L, detail_L, detail_{L-1}, ..., detail_1]``, each detail band half
the length of the next finer one. All transforms act along the last axis,
so a stack of rows is transformed at once.
"""
from dataclasses import dataclass

import numpy as np

__all__ = [
    "WaveletPlan",
    "haar_forward",
    "haar_inverse",
    "compose_sensing",
    "block_signal",
]

_R2 = np.sqrt(0.5)


@dataclass(frozen=True)
class WaveletPlan:
    n: int
    levels: int = 4

    def __post_init__(self):
        if self.levels < 0:
            raise ValueError(f"levels must be >= 0, got {self.levels}")
        if self.n < 1 or self.n % (1 << self.levels):
            raise ValueError(f"n={self.n} is not divisible by 2**{self.levels}")

    @property
    def approx_length(self):
        return self.n >> self.levels


def _check(x, plan):
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != plan.n:
        raise ValueError(f"expected length {plan.n} along the last axis, got {x.shape[-1]}")
    return x


def haar_forward(x, plan):
    x = _check(x, plan)
    out = x.copy()
    length = plan.n
    for _ in range(plan.levels):
        band = out[..., :length]
        even, odd = band[..., 0::2], band[..., 1::2]
        approx = (even + odd) * _R2
        detail = (even - odd) * _R2
        half = length // 2
        out[..., :half] = approx
        out[..., half:length] = detail
        length = half
    return out


def haar_inverse(c, plan):
    c = _check(c, plan)
    out = c.copy()
    length = plan.approx_length
    for _ in range(plan.levels):
        approx = out[..., :length].copy()
        detail = out[..., length:2 * length].copy()
        out[..., 0:2 * length:2] = (approx + detail) * _R2
        out[..., 1:2 * length:2] = (approx - detail) * _R2
        length *= 2
    return out


def compose_sensing(G, plan):
    """Dense matrix of ``c -> G @ haar_inverse(c)``.

    The inverse transform is orthonormal, so its matrix is the transpose of
    the forward one and ``G @ W^T`` is the forward transform of each row of
    ``G``.
    """
    G = np.asarray(G, dtype=np.float64)
    if G.ndim != 2 or G.shape[1] != plan.n:
        raise ValueError(f"G must have {plan.n} columns, got shape {G.shape}")
    return haar_forward(G, plan)


def block_signal(plan, nnz, scale=1.0):
    """Deterministic piecewise-constant test signal and its Haar coefficients.

    Exactly ``nnz`` coefficients are nonzero: they are spread over the
    approximation band and the two coarsest detail bands, with magnitudes
    between ``0.5 * scale`` and ``2 * scale`` and alternating signs. Returns
    ``(signal, coefficients)``.
    """
    n_a = plan.approx_length
    candidates = list(range(n_a))
    if plan.levels >= 1:
        candidates += list(range(n_a, 2 * n_a))
    if plan.levels >= 2:
        candidates += list(range(2 * n_a, 4 * n_a))
    if nnz > len(candidates):
        raise ValueError(f"at most {len(candidates)} coefficients available, asked for {nnz}")
    # spread picks evenly across the candidate list
    picks = [candidates[(k * len(candidates)) // max(nnz, 1)] for k in range(nnz)]
    coeffs = np.zeros(plan.n)
    mags = np.linspace(2.0, 0.5, nnz) if nnz > 1 else np.array([1.0])
    signs = np.where(np.arange(nnz) % 2 == 0, 1.0, -1.0)
    coeffs[picks] = scale * mags * signs
    return haar_inverse(coeffs, plan), coeffs
