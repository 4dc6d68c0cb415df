"""Ground-truth sparse signals and Gaussian phaseless measurements.

Every generator takes a ``numpy.random.Generator``. Use :func:`make_rng` to
derive one from a ``(seed, stream)`` pair; PCG64 streams keyed this way are
reproducible across runs and platforms and independent of each other, so a
trial can be re-run in isolation.
"""
from dataclasses import dataclass

import numpy as np

from .linalg import as_vector

__all__ = [
    "SparseSignal",
    "MeasurementEnsemble",
    "make_rng",
    "generate_signal",
    "generate_ensemble",
    "measure",
    "sign_vector",
]


def make_rng(seed, stream=0):
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(stream),))
    return np.random.Generator(np.random.PCG64(ss))


@dataclass(frozen=True)
class SparseSignal:
    full: np.ndarray
    support: np.ndarray

    @property
    def n(self):
        return self.full.shape[0]

    @property
    def s(self):
        return self.support.shape[0]

    @property
    def values(self):
        return self.full[self.support]

    @property
    def norm(self):
        return float(np.linalg.norm(self.full))

    @property
    def min_magnitude(self):
        """Smallest nonzero entry in magnitude (0 for the zero signal)."""
        nz = np.abs(self.full[self.full != 0])
        return float(nz.min()) if nz.size else 0.0

    @classmethod
    def from_dense(cls, x):
        x = as_vector(x)
        return cls(full=x.copy(), support=np.flatnonzero(x))


@dataclass(frozen=True)
class MeasurementEnsemble:
    """Sensing matrix and observations, both already scaled by ``1/sqrt(m)``.

    ``noise`` is the scaled noise vector, so that
    ``y_observed = y_clean + noise`` holds exactly.
    """

    A: np.ndarray
    y_clean: np.ndarray
    y_observed: np.ndarray
    noise: np.ndarray
    sigma: float

    @property
    def m(self):
        return self.A.shape[0]

    @property
    def n(self):
        return self.A.shape[1]


def generate_signal(n, s, rng):
    """Uniformly random support of size ``s`` with standard normal values."""
    if not 1 <= s <= n:
        raise ValueError(f"need 1 <= s <= n, got s={s}, n={n}")
    support = np.sort(rng.choice(n, size=s, replace=False))
    full = np.zeros(n)
    full[support] = rng.standard_normal(s)
    return SparseSignal(full=full, support=support)


def measure(raw, x, sigma, rng):
    """Phaseless measurements of ``x`` through an unscaled ``m x n`` matrix.

    Noise ``sigma * N(0, 1)`` is added at raw scale, then matrix and
    observations are scaled by ``1/sqrt(m)``. Negative noisy observations are
    kept as they are.
    """
    if sigma < 0:
        raise ValueError(f"sigma must be nonnegative, got {sigma}")
    m = raw.shape[0]
    if m < 1:
        raise ValueError("need at least one measurement")
    x = x.full if isinstance(x, SparseSignal) else as_vector(x, raw.shape[1])
    scale = 1.0 / np.sqrt(m)
    y_raw = np.abs(raw @ x)
    if sigma > 0:
        eps = sigma * rng.standard_normal(m)
        noise = eps * scale
    else:
        noise = np.zeros(m)
    y_clean = y_raw * scale
    y_obs = y_clean + noise if sigma > 0 else y_clean
    return MeasurementEnsemble(
        A=raw * scale,
        y_clean=y_clean,
        y_observed=y_obs,
        noise=noise,
        sigma=float(sigma),
    )


def generate_ensemble(x, m, sigma, rng):
    """i.i.d. standard Gaussian rows, then :func:`measure`."""
    if m < 1:
        raise ValueError(f"need m >= 1, got {m}")
    if sigma < 0:
        raise ValueError(f"sigma must be nonnegative, got {sigma}")
    n = x.n if isinstance(x, SparseSignal) else np.shape(x)[0]
    raw = rng.standard_normal((m, n))
    return measure(raw, x, sigma, rng)


def sign_vector(v):
    # np.sign already maps 0 -> 0
    return np.sign(v)
