"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the report lines
inline; they are written to the terminal even without ``-s``. Every
Monte Carlo criterion uses master seed 0, fixed before any run.
"""
import math

import numpy as np
import pytest

from sparsepr.harness import ExperimentSpec, build_instance, run_experiment, trial_seed
from sparsepr.linalg import restricted_least_squares
from sparsepr.metrics import dist, relative_error
from sparsepr.model import generate_ensemble, generate_signal, make_rng
from sparsepr.solvers import SolverConfig, hard_threshold, pwf_gradient, solve
from sparsepr.wavelet import WaveletPlan, haar_forward, haar_inverse

from oracles import best_s_term, gauss_solve

SEED = 0
TRIALS = 100


@pytest.fixture
def report(capsys):
    def emit(label, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {label}: {detail}")
        return ok

    return emit


def first_hit(errors, tol):
    """1-based iteration at which ``errors`` first drops to ``tol`` (None if never)."""
    return next((k + 1 for k, e in enumerate(errors) if e <= tol), None)


@pytest.fixture(scope="module")
def noise_free_runs():
    """HTP and IHT error histories at n=2000, m=1500, s=20, mu=0.75."""
    n, m, s = 2000, 1500, 20
    out = []
    for trial in range(TRIALS):
        inst = build_instance(n, m, s, 0.0, trial_seed(SEED, n, m, s, trial))
        x, nx = inst.x_true, np.linalg.norm(inst.x_true)
        htp = solve("HTP", inst.ensemble, inst.init.x0, SolverConfig(s=s, mu=0.75, max_iter=200),
                    stop_when=lambda v: dist(v, x) <= 1e-10 * nx)
        iht = solve("IHT", inst.ensemble, inst.init.x0, SolverConfig(s=s, mu=0.75, max_iter=1000),
                    stop_when=lambda v: dist(v, x) <= 1e-6 * nx)
        out.append(dict(
            x0_error=relative_error(inst.init.x0, x),
            htp=[relative_error(v, x) for v in htp.iterates],
            iht=[relative_error(v, x) for v in iht.iterates],
        ))
    return out


def test_finite_step_exact_recovery(noise_free_runs, report):
    hits = [first_hit(r["htp"], 1e-10) for r in noise_free_runs]
    good = sum(h is not None and h <= 12 for h in hits)
    reached = [h for h in hits if h is not None]
    ok = report(
        "finite-step exact recovery (n=2000, m=1500, s=20)",
        good >= 95,
        f"{good}/{TRIALS} trials reach rel. error <= 1e-10 within 12 iterations "
        f"(max iterations among them {max(reached) if reached else '-'}; need >= 95)",
    )
    assert ok


def test_htp_needs_far_fewer_iterations_than_iht(noise_free_runs, report):
    big = 10**9
    htp = [first_hit(r["htp"], 1e-6) or big for r in noise_free_runs]
    iht = [first_hit(r["iht"], 1e-6) or big for r in noise_free_runs]
    med_htp, med_iht = float(np.median(htp)), float(np.median(iht))
    ok = report(
        "HTP vs IHT iterations to rel. error 1e-6",
        med_iht >= 3 * med_htp,
        f"median HTP {med_htp:g}, median IHT {med_iht:g} (need IHT >= 3 x HTP)",
    )
    assert ok


def test_per_iteration_contraction(noise_free_runs, report):
    good = 0
    worst = 0.0
    for r in noise_free_runs:
        errs = [r["x0_error"], *r["htp"]]
        ratios = [b / a for a, b in zip(errs, errs[1:]) if a > 1e-10]
        worst_here = max(ratios, default=0.0)
        good += worst_here <= 0.95
        worst = max(worst, worst_here)
    ok = report(
        "per-iteration contraction dist_{k+1}/dist_k <= 0.95",
        good >= 95,
        f"{good}/{TRIALS} trials contract at every pre-convergence step (largest ratio seen {worst:.3g}; need >= 95)",
    )
    assert ok


def _max_converged_iterations(summary_records):
    conv = [r.iterations for r in summary_records if r.relative_error <= 1e-10]
    return max(conv) if conv else None, len(summary_records) - len(conv)


def test_iteration_count_trends(report):
    by_s = {}
    for s in (10, 20, 30, 40):
        spec = ExperimentSpec(kind="iter_count_table", n=(2000,), m=(2000,), s=(s,), trials=TRIALS,
                              master_seed=SEED, clock="none")
        records, _ = run_experiment(spec)
        by_s[s] = _max_converged_iterations(records)
    by_m = {2000: by_s[20]}
    for m in (1000, 1500):
        spec = ExperimentSpec(kind="iter_count_table", n=(2000,), m=(m,), s=(20,), trials=TRIALS,
                              master_seed=SEED, clock="none")
        records, _ = run_experiment(spec)
        by_m[m] = _max_converged_iterations(records)
    s_max = [by_s[s][0] for s in (10, 20, 30, 40)]
    m_max = [by_m[m][0] for m in (1000, 1500, 2000)]
    bound = all(v is not None and v <= 10 for v in s_max)
    inc_s = all(a <= b for a, b in zip(s_max, s_max[1:]))
    dec_m = all(a >= b for a, b in zip(m_max, m_max[1:]))
    ok = report(
        "iteration-count trends (n=m=2000; s=20 with m varied)",
        bound and inc_s and dec_m,
        f"max iterations by s 10/20/30/40 = {s_max} (<= 10: {bound}, weakly increasing: {inc_s}); "
        f"by m 1000/1500/2000 at s=20 = {m_max} (weakly decreasing: {dec_m}); "
        f"non-converged trials by s = {[by_s[s][1] for s in (10, 20, 30, 40)]}",
    )
    assert ok


@pytest.fixture(scope="module")
def noise_sweep():
    spec = ExperimentSpec(kind="noise_sweep", n=(1500,), m=(1000,), s=(30,), sigma=(0.001, 0.01, 0.05, 0.1),
                          trials=TRIALS, master_seed=SEED, clock="none")
    records, summaries = run_experiment(spec)
    return records, {g.sigma: g for g in summaries}


def test_noise_robustness_dist_bound(noise_sweep, report):
    records, _ = noise_sweep
    # dist = relative_error * ||x||, with ||x|| regenerated from the trial seed
    means = {}
    for sigma in (0.01, 0.05):
        ds = []
        for r in records:
            if r.sigma != sigma:
                continue
            inst_norm = _signal_norm(r.seed, r.n, r.s)
            ds.append(r.relative_error * inst_norm)
        means[sigma] = float(np.mean(ds))
    ok_each = {sg: means[sg] <= 20 * sg for sg in means}
    ok = report(
        "noise robustness: mean dist <= 20 sigma (n=1500, m=1000, s=30)",
        all(ok_each.values()),
        ", ".join(f"sigma={sg}: mean dist {means[sg]:.4g} vs bound {20 * sg:g} ({'ok' if ok_each[sg] else 'exceeded'})"
                  for sg in means),
    )
    assert ok


def _signal_norm(seed, n, s):
    return generate_signal(n, s, make_rng(seed, 0)).norm


def test_noise_robustness_monotone(noise_sweep, report):
    _, by_sigma = noise_sweep
    sigmas = (0.1, 0.05, 0.01, 0.001)
    logs = [by_sigma[sg].log_mean_relative_error for sg in sigmas]
    ok = report(
        "noise robustness: log mean rel. error decreases with sigma",
        all(a > b for a, b in zip(logs, logs[1:])),
        "sigma 0.1/0.05/0.01/0.001 -> " + ", ".join(f"{v:.4f}" for v in logs)
        + " (success rates " + ", ".join(f"{by_sigma[sg].success_rate:.2f}" for sg in sigmas) + ")",
    )
    assert ok


def test_phase_transition(report):
    ms = (200, 400, 600, 800, 1000, 1200, 1500)
    spec = ExperimentSpec(kind="phase_grid", n=(1000,), m=ms, s=(20,), trials=TRIALS, master_seed=SEED, clock="none")
    _, summaries = run_experiment(spec)
    rate = {g.m: g.success_rate for g in summaries}
    rates = [rate[m] for m in ms]
    low, high = rates[0] <= 0.10, rates[-1] >= 0.95
    mono = all(b >= a - 0.05 for a, b in zip(rates, rates[1:]))
    ok = report(
        "phase transition (n=1000, s=20)",
        low and high and mono,
        "success by m " + ", ".join(f"{m}:{r:.2f}" for m, r in zip(ms, rates))
        + f" (<=0.10 at 200: {low}, >=0.95 at 1500: {high}, nondecreasing within 0.05: {mono})",
    )
    assert ok


def test_oracle_equivalences(report):
    rng = np.random.default_rng(2024)
    worst_ls = 0.0
    for _ in range(100):
        n = int(rng.integers(1, 9))
        m = int(rng.integers(n, 13))
        s = int(rng.integers(1, min(4, n) + 1))
        A = rng.standard_normal((m, n))
        b = rng.standard_normal(m)
        S = np.sort(rng.choice(n, s, replace=False))
        x = restricted_least_squares(A, b, S)
        As = A[:, S]
        ref = np.zeros(n)
        ref[S] = gauss_solve(
            [[float(sum(As[k, i] * As[k, j] for k in range(m))) for j in range(s)] for i in range(s)],
            [float(sum(As[k, i] * b[k] for k in range(m))) for i in range(s)],
        )
        worst_ls = max(worst_ls, float(np.max(np.abs(x - ref))))
    ht_exact = 0
    for _ in range(100):
        n = int(rng.integers(1, 11))
        s = int(rng.integers(1, min(4, n) + 1))
        v = rng.standard_normal(n)
        best, _ = best_s_term(v, s)
        ht_exact += bool(np.array_equal(hard_threshold(v, s), best))
    worst_fd = 0.0
    for k in range(50):
        n, m = int(rng.integers(3, 15)), int(rng.integers(3, 30))
        x_true = generate_signal(n, min(2, n), make_rng(k, 0)).full
        ens = generate_ensemble(x_true, m, 0.1, make_rng(k, 1))
        x = rng.standard_normal(n)

        def loss(u):
            return 0.5 * np.sum((ens.y_observed ** 2 - (ens.A @ u) ** 2) ** 2)

        h = 1e-6
        fd = np.array([(loss(x + h * e) - loss(x - h * e)) / (2 * h) for e in np.eye(n)])
        worst_fd = max(worst_fd, float(np.linalg.norm(pwf_gradient(ens, x) - fd) / np.linalg.norm(fd)))
    ok = report(
        "oracle equivalences",
        worst_ls <= 1e-9 and ht_exact == 100 and worst_fd <= 1e-5,
        f"least squares max abs diff {worst_ls:.2e} (<= 1e-9); hard threshold exact {ht_exact}/100; "
        f"PWF gradient worst rel. diff {worst_fd:.2e} (<= 1e-5)",
    )
    assert ok


def test_initialization_quality(report):
    n, m, s = 200, 2000, 5
    good = 0
    errs = []
    for trial in range(TRIALS):
        inst = build_instance(n, m, s, 0.0, trial_seed(SEED, n, m, s, trial))
        e = relative_error(inst.init.x0, inst.x_true)
        errs.append(e)
        good += e <= 0.2
    ok = report(
        "initialization quality dist(x0, x) <= 0.2 ||x|| (n=200, m=2000, s=5)",
        good >= 90,
        f"{good}/{TRIALS} trials (median rel. error {np.median(errs):.3f}; need >= 90)",
    )
    assert ok


def test_haar_round_trip(report):
    rng = np.random.default_rng(9)
    worst = 0.0
    for _ in range(100):
        levels = int(rng.integers(0, 6))
        plan = WaveletPlan(int(rng.integers(1, 9)) << levels, levels)
        x = rng.standard_normal(plan.n) * 10 ** rng.uniform(-3, 3)
        back = haar_inverse(haar_forward(x, plan), plan)
        worst = max(worst, float(np.max(np.abs(back - x)) / max(1.0, np.max(np.abs(x)))))
    ok = report("Haar round trip", worst <= 1e-10, f"worst scaled error {worst:.2e} over 100 vectors (<= 1e-10)")
    assert ok


def test_wavelet_reconstruction(report):
    n, m = 1024, 400
    spec = ExperimentSpec(kind="wavelet_1d", n=(n,), m=(m,), s=(int(0.01 * n),), sigma=(0.05,), levels=4,
                          trials=TRIALS, master_seed=SEED, clock="none")
    records, _ = run_experiment(spec)
    db = [r.psnr / math.log(10) for r in records]
    good = sum(v >= 25 for v in db)
    ok = report(
        "1-D wavelet reconstruction PSNR >= 25 dB (n=1024, m=400, sigma=0.05)",
        good >= 80,
        f"{good}/{TRIALS} trials (median {np.median(db):.1f} dB; need >= 80)",
    )
    assert ok


def test_determinism_across_workers(tmp_path, report):
    spec = ExperimentSpec(kind="phase_grid", n=(300,), m=(100, 200), s=(5,), sigma=(0.0, 0.01),
                          methods=("HTP", "IHT"), trials=6, master_seed=SEED, clock="none")
    outputs = []
    for workers in (1, 2, 1):
        path = tmp_path / f"w{workers}_{len(outputs)}.csv"
        run_experiment(ExperimentSpec(**{**spec.__dict__, "output_path": str(path)}), workers=workers)
        outputs.append(path.read_bytes())
    same = len(set(outputs)) == 1
    ok = report("determinism across worker counts", same,
                f"{len(outputs)} runs (workers 1, 2, 1), {len(outputs[0])} bytes each, identical: {same}")
    assert ok
