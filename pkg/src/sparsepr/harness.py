"""Seeded Monte Carlo experiments over grids of problem sizes.

An :class:`ExperimentSpec` names an experiment kind and lists of values for
``n, m, s, sigma, mu``; every point of their Cartesian product is run for
``trials`` independent trials and every listed method. Each trial derives
its own seed from the master seed and its coordinates, so any single cell
can be re-run alone and the output does not depend on the number of
worker processes.
"""
import configparser
import csv
import hashlib
import io
import itertools
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np

from .init import spectral_init
from .metrics import SUCCESS_THRESHOLD, dist, psnr, relative_error
from .model import generate_ensemble, generate_signal, make_rng, measure
from .solvers import Method, SolverConfig, solve
from .wavelet import WaveletPlan, block_signal, compose_sensing, haar_inverse

__all__ = [
    "KINDS",
    "CSV_COLUMNS",
    "ExperimentSpec",
    "TrialRecord",
    "GridSummary",
    "trial_seed",
    "build_instance",
    "wavelet_nnz",
    "run_trial",
    "run_experiment",
    "summarize",
    "emit_csv",
    "emit_summary_json",
    "records_to_csv",
    "parse_config",
    "load_config",
]

KINDS = ("iter_trace", "iter_count_table", "timing", "noise_sweep", "phase_grid", "wavelet_1d")

# relative error at which a trial stops early, per kind (None: library rules only)
DEFAULT_TARGET = {
    "iter_trace": None,
    "iter_count_table": 1e-10,
    "timing": SUCCESS_THRESHOLD,
    "noise_sweep": None,
    "phase_grid": None,
    "wavelet_1d": None,
}

CSV_COLUMNS = (
    "kind", "n", "m", "s", "sigma", "mu", "method", "trial", "seed",
    "iterations", "seconds", "relative_error", "success", "termination",
)

# streams carved out of one trial seed
_SIGNAL, _ENSEMBLE, _INIT, _NOISE = 0, 1, 2, 3


@dataclass(frozen=True)
class ExperimentSpec:
    kind: str
    n: tuple
    m: tuple
    s: tuple
    sigma: tuple = (0.0,)
    mu: tuple = (0.75,)
    trials: int = 100
    master_seed: int = 0
    methods: tuple = ("HTP",)
    output_path: Optional[str] = None
    max_iter: int = 200
    target_error: Optional[float] = None
    success_threshold: float = SUCCESS_THRESHOLD
    levels: int = 4
    # wavelet_1d only: nonzeros of the test signal (default: wavelet_nnz(n))
    nnz: Optional[int] = None
    # "wall" records timings; "none" writes zeros so output is byte-reproducible
    clock: str = "wall"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}; expected one of {KINDS}")
        for name in ("n", "m", "s", "sigma", "mu", "methods"):
            value = getattr(self, name)
            if isinstance(value, (str, int, float)):
                value = (value,)
            value = tuple(value)
            if not value:
                raise ValueError(f"grid axis {name!r} is empty")
            object.__setattr__(self, name, value)
        object.__setattr__(self, "methods", tuple(Method(mm).value for mm in self.methods))
        for name in ("n", "m", "s", "mu"):
            if any(not v > 0 for v in getattr(self, name)):
                raise ValueError(f"grid axis {name!r} must be positive")
        if any(v < 0 for v in self.sigma):
            raise ValueError("sigma values must be nonnegative")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if self.clock not in ("wall", "none"):
            raise ValueError(f"clock must be 'wall' or 'none', got {self.clock!r}")

    @property
    def target(self):
        return self.target_error if self.target_error is not None else DEFAULT_TARGET[self.kind]

    def points(self):
        for n, m, s, sigma, mu in itertools.product(self.n, self.m, self.s, self.sigma, self.mu):
            yield int(n), int(m), int(s), float(sigma), float(mu)


@dataclass(frozen=True)
class TrialRecord:
    kind: str
    n: int
    m: int
    s: int
    sigma: float
    mu: float
    method: str
    trial: int
    seed: int
    iterations: int
    seconds: float
    relative_error: float
    success: bool
    termination: str
    # not part of the CSV schema; feed the JSON summary
    error_curve: tuple = field(default=(), compare=False, repr=False)
    psnr: Optional[float] = field(default=None, compare=False, repr=False)

    def sort_key(self):
        return (self.n, self.m, self.s, self.sigma, self.mu, self.method, self.trial)

    def csv_row(self):
        return [
            self.kind, str(self.n), str(self.m), str(self.s), repr(self.sigma), repr(self.mu),
            self.method, str(self.trial), str(self.seed), str(self.iterations),
            repr(self.seconds), repr(self.relative_error),
            "true" if self.success else "false", self.termination,
        ]


@dataclass(frozen=True)
class GridSummary:
    n: int
    m: int
    s: int
    sigma: float
    mu: float
    method: str
    trials: int
    successes: int
    failures: int
    success_rate: float
    mean_iterations: float
    median_iterations: float
    max_iterations: int
    mean_seconds: Optional[float]
    mean_relative_error: float
    log_mean_relative_error: float
    mean_log_relative_error: float
    error_curve: Optional[list] = None
    mean_psnr: Optional[float] = None
    mean_psnr_db: Optional[float] = None


def trial_seed(master_seed, n, m, s, trial):
    """64-bit seed for one trial of one ``(n, m, s)`` cell.

    Noise level, step size and method are left out on purpose: every method,
    step size and noise level sees the same signal, sensing matrix and
    standard normal noise draws (only their scale ``sigma`` differs).
    """
    key = f"{int(master_seed)}|{int(n)}|{int(m)}|{int(s)}|{int(trial)}"
    return int.from_bytes(hashlib.blake2b(key.encode(), digest_size=8).digest(), "little")


def wavelet_nnz(n):
    """Nonzero count of the bundled wavelet test signal at length ``n``.

    Keeps the density of the reference setup: 37 nonzero coefficients at
    ``n = 8000``.
    """
    return max(1, round(37 * n / 8000))


@dataclass(frozen=True)
class Instance:
    x_true: np.ndarray
    ensemble: object
    init: object
    init_seconds: float
    plan: Optional[WaveletPlan] = None
    signal: Optional[np.ndarray] = None


def build_instance(n, m, s, sigma, seed, wavelet_levels=None, nnz=None):
    """Signal, measurements and spectral initialization for one trial.

    With ``wavelet_levels`` set, the unknown is the Haar coefficient vector
    of :func:`~sparsepr.wavelet.block_signal` and the sensing matrix is a
    Gaussian matrix composed with the inverse transform.
    """
    plan = signal = None
    if wavelet_levels is not None:
        plan = WaveletPlan(n, wavelet_levels)
        signal, x_true = block_signal(plan, nnz if nnz is not None else wavelet_nnz(n))
        G = make_rng(seed, _ENSEMBLE).standard_normal((m, n))
        ens = measure(compose_sensing(G, plan), x_true, sigma, make_rng(seed, _NOISE))
    else:
        x_true = generate_signal(n, s, make_rng(seed, _SIGNAL)).full
        ens = generate_ensemble(x_true, m, sigma, make_rng(seed, _ENSEMBLE))
    t0 = time.perf_counter()
    report = spectral_init(ens, s, make_rng(seed, _INIT))
    return Instance(x_true, ens, report, time.perf_counter() - t0, plan, signal)


def run_trial(spec, point, trial):
    """All methods on one problem instance; returns one record per method."""
    n, m, s, sigma, mu = point
    seed = trial_seed(spec.master_seed, n, m, s, trial)
    inst = build_instance(
        n, m, s, sigma, seed,
        wavelet_levels=spec.levels if spec.kind == "wavelet_1d" else None,
        nnz=spec.nnz,
    )
    x_true, ens, report, init_seconds = inst.x_true, inst.ensemble, inst.init, inst.init_seconds
    plan, signal = inst.plan, inst.signal
    norm_true = np.linalg.norm(x_true)

    target = spec.target
    stop_when = None
    if target is not None:
        stop_when = lambda x: dist(x, x_true) <= target * norm_true  # noqa: E731

    records = []
    for method in spec.methods:
        cfg = SolverConfig(s=s, mu=mu, max_iter=spec.max_iter)
        t1 = time.perf_counter()
        trace = solve(method, ens, report.x0, cfg, stop_when=stop_when)
        seconds = init_seconds + time.perf_counter() - t1
        x_hat = trace.x
        r = relative_error(x_hat, x_true)
        curve = ()
        if spec.kind == "iter_trace":
            curve = tuple(relative_error(x, x_true) for x in [trace.x0, *trace.iterates])
        p = None
        if plan is not None:
            p = psnr(haar_inverse(x_hat, plan), signal)
        records.append(
            TrialRecord(
                kind=spec.kind, n=n, m=m, s=s, sigma=sigma, mu=mu, method=method,
                trial=trial, seed=seed, iterations=trace.iterations,
                seconds=seconds if spec.clock == "wall" else 0.0,
                relative_error=float(r), success=bool(r <= spec.success_threshold),
                termination=trace.termination.value, error_curve=curve, psnr=p,
            )
        )
    return records


def _run_task(args):
    spec, point, trial = args
    return run_trial(spec, point, trial)


def _check_writable(path):
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "a", encoding="utf-8"):
            pass
    except OSError as exc:
        raise OSError(f"cannot write experiment output to {path}: {exc}") from exc


def summary_path(output_path):
    return str(Path(output_path).with_suffix(".json"))


def run_experiment(spec, workers=1):
    """Run every (grid point, trial) and every method.

    Returns ``(records, summaries)`` with records sorted by coordinates.
    When ``spec.output_path`` is set the CSV is written there and the JSON
    summary next to it (``.json`` suffix); both paths are checked for
    writability before any trial runs.
    """
    if spec.output_path:
        _check_writable(spec.output_path)
        _check_writable(summary_path(spec.output_path))
    tasks = [(spec, p, t) for p in spec.points() for t in range(spec.trials)]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_run_task, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    else:
        chunks = [_run_task(t) for t in tasks]
    records = sorted((r for chunk in chunks for r in chunk), key=TrialRecord.sort_key)
    summaries = summarize(records)
    if spec.output_path:
        emit_csv(records, spec.output_path)
        emit_summary_json(summaries, summary_path(spec.output_path), spec=spec)
    return records, summaries


def _mean_curve(curves):
    length = max(len(c) for c in curves)
    padded = np.array([list(c) + [c[-1]] * (length - len(c)) for c in curves])
    return padded.mean(axis=0).tolist()


def summarize(records):
    """Aggregate records per (grid point, method).

    Success rates count every trial; mean seconds only successful ones.
    """
    groups = {}
    for r in records:
        groups.setdefault((r.n, r.m, r.s, r.sigma, r.mu, r.method), []).append(r)
    out = []
    for (n, m, s, sigma, mu, method), rs in sorted(groups.items()):
        ok = [r for r in rs if r.success]
        its = np.array([r.iterations for r in rs], dtype=float)
        errs = np.array([r.relative_error for r in rs])
        tiny = np.finfo(float).tiny
        curves = [r.error_curve for r in rs if r.error_curve]
        psnrs = [r.psnr for r in rs if r.psnr is not None]
        out.append(
            GridSummary(
                n=n, m=m, s=s, sigma=sigma, mu=mu, method=method,
                trials=len(rs), successes=len(ok), failures=len(rs) - len(ok),
                success_rate=len(ok) / len(rs),
                mean_iterations=float(its.mean()),
                median_iterations=float(np.median(its)),
                max_iterations=int(its.max()),
                mean_seconds=float(np.mean([r.seconds for r in ok])) if ok else None,
                mean_relative_error=float(errs.mean()),
                log_mean_relative_error=float(math.log(max(errs.mean(), tiny))),
                mean_log_relative_error=float(np.mean(np.log(np.maximum(errs, tiny)))),
                error_curve=_mean_curve(curves) if curves else None,
                mean_psnr=float(np.mean(psnrs)) if psnrs else None,
                mean_psnr_db=float(np.mean(psnrs) / math.log(10)) if psnrs else None,
            )
        )
    return out


def records_to_csv(records):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in records:
        writer.writerow(r.csv_row())
    return buf.getvalue()


def emit_csv(records, path):
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(records_to_csv(records))
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from exc


def _finite_or_none(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    if isinstance(v, list):
        return [_finite_or_none(x) for x in v]
    return v


def emit_summary_json(summaries, path, spec=None):
    doc = {
        "psnr_log_base": "e",
        "summaries": [{k: _finite_or_none(v) for k, v in asdict(g).items()} for g in summaries],
    }
    if spec is not None:
        doc["spec"] = {k: list(v) if isinstance(v, tuple) else v for k, v in asdict(spec).items()}
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise OSError(f"cannot write summary JSON to {path}: {exc}") from exc


_LIST_KEYS = {"n": int, "m": int, "s": int, "sigma": float, "mu": float, "methods": str}
_SCALAR_KEYS = {
    "kind": str, "trials": int, "master_seed": int, "output_path": str, "max_iter": int,
    "target_error": float, "success_threshold": float, "levels": int, "clock": str,
    "nnz": int,
}
_ALIASES = {"seed": "master_seed", "out": "output_path", "method": "methods"}


def parse_config(text):
    """Parse a flat ``key = value`` config; list values are comma-separated.

    ``#`` starts a comment line. Recognized keys are the
    :class:`ExperimentSpec` fields plus the aliases ``seed``, ``out`` and
    ``method``.
    """
    parser = configparser.ConfigParser(interpolation=None, comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read_string("[experiment]\n" + text)
    except configparser.Error as exc:
        raise ValueError(f"malformed config: {exc}") from exc
    kwargs = {}
    for key, raw in parser["experiment"].items():
        key = _ALIASES.get(key.strip(), key.strip())
        raw = raw.strip()
        if key in _LIST_KEYS:
            conv = _LIST_KEYS[key]
            kwargs[key] = tuple(conv(v.strip()) for v in raw.split(",") if v.strip())
        elif key in _SCALAR_KEYS:
            kwargs[key] = _SCALAR_KEYS[key](raw) if raw.lower() not in ("", "none") else None
        else:
            raise ValueError(f"unknown config key {key!r}")
    if "kind" not in kwargs:
        raise ValueError("config must set 'kind'")
    for key in ("n", "m", "s"):
        if key not in kwargs:
            raise ValueError(f"config must set {key!r}")
    return ExperimentSpec(**kwargs)


def load_config(path, **overrides):
    with open(path, encoding="utf-8") as fh:
        spec = parse_config(fh.read())
    overrides = {k: v for k, v in overrides.items() if v is not None}
    return replace(spec, **overrides) if overrides else spec
