"""Iterative solvers for sparse phase retrieval.

Three iterations are provided, all mapping an s-sparse iterate to an
s-sparse iterate:

* ``HTP``: guess the measurement signs from the current iterate, pick a
  support with one thresholded gradient step, then solve the sign-resolved
  least squares problem exactly on that support.
* ``IHT``: the thresholded gradient step alone (amplitude loss).
* ``PWF``: thresholded gradient step on the intensity loss
  ``0.5 * ||y^2 - (Ax)^2||^2``.

Each is an odd function of the iterate, so starting from ``-x0`` yields the
sign-flipped trajectory.
"""
import enum
import time
from dataclasses import dataclass, field

import numpy as np

from .linalg import SingularSystemError, restricted_least_squares
from .model import sign_vector

__all__ = [
    "Method",
    "Termination",
    "SolverConfig",
    "SolverTrace",
    "hard_threshold",
    "threshold_support",
    "htp_step",
    "iht_step",
    "pwf_gradient",
    "pwf_step",
    "solve",
]


class Method(str, enum.Enum):
    HTP = "HTP"
    IHT = "IHT"
    PWF = "PWF"


class Termination(str, enum.Enum):
    RESIDUAL_CONVERGED = "residual_converged"
    ITERATE_STALLED = "iterate_stalled"
    SUPPORT_CYCLE = "support_cycle"
    MAX_ITER = "max_iter"
    SINGULAR_SYSTEM = "singular_system"
    # caller-supplied stop_when predicate fired (harness ground-truth targets)
    TARGET_REACHED = "target_reached"


DEFAULT_MU = {Method.HTP: 0.95, Method.IHT: 0.95, Method.PWF: 0.2}


@dataclass(frozen=True)
class SolverConfig:
    s: int
    mu: float = 0.95
    max_iter: int = 200
    stop_tol: float = 1e-12
    residual_tol: float = 1e-10

    def __post_init__(self):
        if self.s < 1:
            raise ValueError(f"sparsity must be >= 1, got {self.s}")
        if not self.mu > 0:
            raise ValueError(f"step size must be > 0, got {self.mu}")
        if self.max_iter < 0:
            raise ValueError(f"max_iter must be >= 0, got {self.max_iter}")
        if not (self.stop_tol > 0 and self.residual_tol > 0):
            raise ValueError("tolerances must be positive")

    @classmethod
    def for_method(cls, method, s, **kwargs):
        kwargs.setdefault("mu", DEFAULT_MU[Method(method)])
        return cls(s=s, **kwargs)


@dataclass
class SolverTrace:
    """Per-iteration history; entry ``k`` describes iterate ``x_{k+1}``."""

    x0: np.ndarray
    iterates: list = field(default_factory=list)
    supports: list = field(default_factory=list)
    residuals: list = field(default_factory=list)
    per_iter_seconds: list = field(default_factory=list)
    termination: Termination = Termination.MAX_ITER

    @property
    def iterations(self):
        return len(self.iterates)

    @property
    def x(self):
        """Final iterate (``x0`` when no step was taken)."""
        return self.iterates[-1] if self.iterates else self.x0


def threshold_support(v, s):
    """Indices of the ``s`` largest ``|v_j|``, ties to the lowest index, sorted."""
    if s > v.shape[0]:
        raise ValueError(f"s={s} exceeds vector length {v.shape[0]}")
    if s <= 0:
        return np.empty(0, dtype=np.intp)
    order = np.argsort(-np.abs(v), kind="stable")
    return np.sort(order[:s])


def hard_threshold(v, s):
    """Keep the ``s`` largest entries of ``v`` in magnitude, zero the rest."""
    keep = threshold_support(v, s)
    out = np.zeros_like(v, dtype=np.float64)
    out[keep] = v[keep]
    return out


def _relative_residual(z, y):
    ny = np.linalg.norm(y)
    r = np.linalg.norm(np.abs(z) - y)
    return r / ny if ny > 0 else r


def htp_step(ensemble, x, cfg, z=None):
    """One HTP iteration; returns ``(x_next, support)``.

    ``z`` may carry a precomputed ``A @ x``. Raises
    :class:`~sparsepr.linalg.SingularSystemError` when the restricted least
    squares problem is rank deficient.
    """
    A, y = ensemble.A, ensemble.y_observed
    if z is None:
        z = A @ x
    y_signed = y * sign_vector(z)
    proxy = x + cfg.mu * (A.T @ (y_signed - z))
    support = np.flatnonzero(hard_threshold(proxy, cfg.s))
    return restricted_least_squares(A, y_signed, support), support


def iht_step(ensemble, x, cfg, z=None):
    A, y = ensemble.A, ensemble.y_observed
    if z is None:
        z = A @ x
    return hard_threshold(x + cfg.mu * (A.T @ (y * sign_vector(z) - z)), cfg.s)


def pwf_gradient(ensemble, x, z=None):
    """Gradient of ``0.5 * ||y^2 - (Ax)^2||^2``: ``2 A^T(((Ax)^2 - y^2) * Ax)``."""
    A, y = ensemble.A, ensemble.y_observed
    if z is None:
        z = A @ x
    return 2.0 * (A.T @ ((z ** 2 - y ** 2) * z))


def pwf_step_size(ensemble, fraction=0.5):
    """Step size scaled to the local curvature of the intensity loss.

    Near a solution the restricted Hessian is roughly
    ``(4/m) (||x||^2 I + 2 x x^T)``, so steps below ``m / (6 ||x||^2)`` are
    stable. ``||y||^2`` stands in for ``||x||^2``.
    """
    energy = float(np.sum(ensemble.y_observed ** 2))
    if energy == 0.0:
        raise ValueError("observations are all zero")
    return fraction * ensemble.m / (6.0 * energy)


def pwf_step(ensemble, x, cfg, z=None):
    return hard_threshold(x - cfg.mu * pwf_gradient(ensemble, x, z), cfg.s)


def solve(method, ensemble, x0, cfg, stop_when=None):
    """Iterate ``method`` from ``x0`` until a stopping rule fires.

    Stopping rules, checked after each step in this order: relative
    amplitude residual ``|| |Ax| - y || / ||y||`` at most ``residual_tol``;
    relative iterate change below ``stop_tol``; (HTP) support unchanged and
    residual stagnant; ``max_iter`` steps taken. A singular restricted
    system ends the trace without adding an entry.

    ``stop_when(x)`` is an optional extra predicate, evaluated on ``x0`` and
    then on every iterate; when it returns true the trace ends with
    ``Termination.TARGET_REACHED``.
    """
    method = Method(method)
    A = ensemble.A
    x = np.asarray(x0, dtype=np.float64)
    if x.shape != (ensemble.n,):
        raise ValueError(f"x0 must have length {ensemble.n}, got shape {x.shape}")
    trace = SolverTrace(x0=x.copy())
    if stop_when is not None and stop_when(x):
        trace.termination = Termination.TARGET_REACHED
        return trace

    y = ensemble.y_observed
    z = A @ x
    prev_res = _relative_residual(z, y)
    prev_support = None
    for _ in range(cfg.max_iter):
        t0 = time.perf_counter()
        try:
            if method is Method.HTP:
                x_new, support = htp_step(ensemble, x, cfg, z)
                z_new = A[:, support] @ x_new[support]
            else:
                if method is Method.IHT:
                    x_new = iht_step(ensemble, x, cfg, z)
                else:
                    x_new = pwf_step(ensemble, x, cfg, z)
                support = np.flatnonzero(x_new)
                z_new = A @ x_new
        except SingularSystemError:
            trace.termination = Termination.SINGULAR_SYSTEM
            return trace
        res = _relative_residual(z_new, y)
        trace.per_iter_seconds.append(time.perf_counter() - t0)
        trace.iterates.append(x_new)
        trace.supports.append(support)
        trace.residuals.append(res)

        change = np.linalg.norm(x_new - x)
        scale = max(np.linalg.norm(x_new), np.finfo(float).tiny)
        same_support = prev_support is not None and np.array_equal(support, prev_support)
        x, z, prev_support = x_new, z_new, support

        if stop_when is not None and stop_when(x):
            trace.termination = Termination.TARGET_REACHED
            return trace
        if res <= cfg.residual_tol:
            trace.termination = Termination.RESIDUAL_CONVERGED
            return trace
        if change <= cfg.stop_tol * scale:
            trace.termination = Termination.ITERATE_STALLED
            return trace
        if (
            method is Method.HTP
            and same_support
            and abs(prev_res - res) <= cfg.stop_tol * max(prev_res, np.finfo(float).tiny)
        ):
            trace.termination = Termination.SUPPORT_CYCLE
            return trace
        prev_res = res

    trace.termination = Termination.MAX_ITER
    return trace
