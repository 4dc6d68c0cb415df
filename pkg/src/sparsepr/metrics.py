"""Recovery metrics modulo the global sign."""
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

__all__ = [
    "SUCCESS_THRESHOLD",
    "RecoveryAssessment",
    "dist",
    "relative_error",
    "is_success",
    "sign_align",
    "psnr",
    "snr_db",
    "assess",
]

SUCCESS_THRESHOLD = 1e-3


def _check_pair(x, x_ref):
    x = np.asarray(x, dtype=np.float64)
    x_ref = np.asarray(x_ref, dtype=np.float64)
    if x.shape != x_ref.shape:
        raise ValueError(f"length mismatch: {x.shape} vs {x_ref.shape}")
    return x, x_ref


def dist(x, x_ref):
    """``min(||x - x_ref||, ||x + x_ref||)``."""
    x, x_ref = _check_pair(x, x_ref)
    return float(min(np.linalg.norm(x - x_ref), np.linalg.norm(x + x_ref)))


def relative_error(x, x_ref):
    nref = np.linalg.norm(x_ref)
    d = dist(x, x_ref)
    if nref == 0:
        return 0.0 if d == 0 else math.inf
    return d / nref


def is_success(x, x_ref, threshold=SUCCESS_THRESHOLD):
    return relative_error(x, x_ref) <= threshold


def sign_align(x, x_ref):
    """``x`` or ``-x``, whichever is closer to ``x_ref``."""
    x, x_ref = _check_pair(x, x_ref)
    return x if np.linalg.norm(x - x_ref) <= np.linalg.norm(x + x_ref) else -x


def psnr(x_hat, x_ref, base="e"):
    """Peak signal-to-noise ratio ``10 log(V^2 / MSE)``.

    ``V`` is the largest absolute entry over both vectors and ``MSE`` the
    mean squared error after sign alignment. ``base`` is ``"e"`` (natural
    log) or ``10`` for the usual decibel figure. Returns ``inf`` for an
    exact reconstruction.
    """
    x_hat, x_ref = _check_pair(x_hat, x_ref)
    V = max(np.max(np.abs(x_hat), initial=0.0), np.max(np.abs(x_ref), initial=0.0))
    if V == 0:
        raise ValueError("psnr undefined when both vectors are zero")
    mse = float(np.mean((sign_align(x_hat, x_ref) - x_ref) ** 2))
    if mse == 0:
        return math.inf
    ratio = V * V / mse
    if base in ("e", math.e):
        return 10.0 * math.log(ratio)
    if base == 10:
        return 10.0 * math.log10(ratio)
    raise ValueError(f"unsupported log base {base!r}")


def snr_db(y_clean, noise):
    """``10 log10(||y||^2 / ||noise||^2)``; ``inf`` for zero noise."""
    y_clean, noise = _check_pair(y_clean, noise)
    nn = float(noise @ noise)
    if nn == 0:
        return math.inf
    return 10.0 * math.log10(float(y_clean @ y_clean) / nn)


@dataclass(frozen=True)
class RecoveryAssessment:
    dist: float
    relative_error: float
    success: bool
    iterations: int
    seconds: float
    psnr: Optional[float] = None


def assess(x_hat, x_ref, iterations=0, seconds=0.0, threshold=SUCCESS_THRESHOLD, with_psnr=False):
    d = dist(x_hat, x_ref)
    r = relative_error(x_hat, x_ref)
    return RecoveryAssessment(
        dist=d,
        relative_error=r,
        success=r <= threshold,
        iterations=int(iterations),
        seconds=float(seconds),
        psnr=psnr(x_hat, x_ref) if with_psnr else None,
    )
