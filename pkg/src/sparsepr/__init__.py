"""Sparse phase retrieval by hard thresholding pursuit.

Solvers (HTP, IHT, projected Wirtinger flow), spectral initialization,
Gaussian measurement models, a Haar wavelet transform and a seeded
benchmark harness.
"""
from .init import InitReport, estimate_support, spectral_init
from .linalg import SingularSystemError, principal_eigenvector, restricted_least_squares
from .metrics import assess, dist, psnr, relative_error, snr_db
from .model import MeasurementEnsemble, SparseSignal, generate_ensemble, generate_signal, make_rng
from .solvers import Method, SolverConfig, SolverTrace, Termination, hard_threshold, pwf_step_size, solve

__version__ = "0.1.0"

__all__ = [
    "InitReport",
    "MeasurementEnsemble",
    "Method",
    "SingularSystemError",
    "SolverConfig",
    "SolverTrace",
    "SparseSignal",
    "Termination",
    "assess",
    "dist",
    "estimate_support",
    "generate_ensemble",
    "generate_signal",
    "hard_threshold",
    "make_rng",
    "principal_eigenvector",
    "psnr",
    "pwf_step_size",
    "relative_error",
    "restricted_least_squares",
    "snr_db",
    "solve",
    "spectral_init",
]
