"""Command line entry point: ``sparsepr {solve,bench,grid,wavelet1d}``."""
import argparse
import platform
import sys

import numpy as np
import scipy

from . import __version__
from .harness import ExperimentSpec, build_instance, load_config, run_experiment, trial_seed
from .metrics import dist, relative_error
from .solvers import Method, SolverConfig, pwf_step_size, solve


def _ints(text):
    return tuple(int(v) for v in text.split(",") if v.strip())


def _floats(text):
    return tuple(float(v) for v in text.split(",") if v.strip())


def _methods(text):
    return tuple(Method(v.strip().upper()).value for v in text.split(",") if v.strip())


def version_string():
    return (
        f"sparsepr {__version__} (python {platform.python_version()}, "
        f"numpy {np.__version__}, scipy {scipy.__version__})"
    )


def _common(p, trials=True):
    p.add_argument("--seed", type=int, default=None, help="master seed")
    if trials:
        p.add_argument("--trials", type=int, default=None)
    p.add_argument("--mu", type=_floats, default=None, help="step size(s), comma-separated")
    p.add_argument("--out", default=None, help="CSV output path (summary JSON goes next to it)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--no-clock", action="store_true", help="write zero timings for byte-reproducible output")


def build_parser():
    parser = argparse.ArgumentParser(prog="sparsepr", description=__doc__)
    parser.add_argument("--version", action="version", version=version_string())
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one random instance and print the trace")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--m", type=int, default=800)
    p.add_argument("--s", type=int, default=10)
    p.add_argument("--sigma", type=float, default=0.0)
    p.add_argument("--method", type=lambda v: Method(v.upper()), default=Method.HTP)
    p.add_argument("--mu", type=float, default=None)
    p.add_argument("--max-iter", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("bench", help="run an experiment described by a config file")
    p.add_argument("config")
    _common(p)

    p = sub.add_parser("grid", help="phase transition over sample sizes and sparsities")
    p.add_argument("--n", type=_ints, default=(1000,))
    p.add_argument("--m", type=_ints, default=(200, 400, 600, 800, 1000, 1200, 1500))
    p.add_argument("--s", type=_ints, default=(20,))
    p.add_argument("--sigma", type=_floats, default=(0.0,))
    p.add_argument("--methods", type=_methods, default=("HTP",))
    _common(p)

    p = sub.add_parser("wavelet1d", help="recover the bundled piecewise-constant signal")
    p.add_argument("--n", type=int, default=1024)
    p.add_argument("--m", type=int, default=400)
    p.add_argument("--s", type=int, default=None, help="default floor(0.01 n)")
    p.add_argument("--levels", type=int, default=4)
    p.add_argument("--sigma", type=float, default=0.05)
    p.add_argument("--nnz", type=int, default=None)
    _common(p)
    return parser


def cmd_solve(args, out):
    inst = build_instance(args.n, args.m, args.s, args.sigma, trial_seed(args.seed, args.n, args.m, args.s, 0))
    mu = args.mu
    if mu is None and args.method is Method.PWF:
        mu = pwf_step_size(inst.ensemble)
    cfg = SolverConfig.for_method(args.method, args.s, max_iter=args.max_iter, **({"mu": mu} if mu is not None else {}))
    x_true = inst.x_true
    trace = solve(args.method, inst.ensemble, inst.init.x0, cfg)
    print(f"# method={args.method.value} n={args.n} m={args.m} s={args.s} sigma={args.sigma} mu={cfg.mu}", file=out)
    print("k,relative_error,residual,support_size,seconds", file=out)
    print(f"0,{relative_error(trace.x0, x_true):.6e},,{np.count_nonzero(trace.x0)},", file=out)
    for k, (x, res, supp, sec) in enumerate(
        zip(trace.iterates, trace.residuals, trace.supports, trace.per_iter_seconds), start=1
    ):
        print(f"{k},{relative_error(x, x_true):.6e},{res:.6e},{len(supp)},{sec:.6f}", file=out)
    print(f"# termination={trace.termination.value} dist={dist(trace.x, x_true):.6e}", file=out)
    return 0


def _overrides(args):
    return {
        "master_seed": args.seed,
        "trials": getattr(args, "trials", None),
        "mu": args.mu,
        "output_path": args.out,
        "clock": "none" if args.no_clock else None,
    }


def _report(spec, workers, out):
    _, summaries = run_experiment(spec, workers=workers)
    print("n,m,s,sigma,mu,method,trials,success_rate,mean_iterations,max_iterations,mean_seconds,log_mean_relative_error",
          file=out)
    for g in summaries:
        secs = "" if g.mean_seconds is None else f"{g.mean_seconds:.6f}"
        print(f"{g.n},{g.m},{g.s},{g.sigma},{g.mu},{g.method},{g.trials},{g.success_rate:.3f},"
              f"{g.mean_iterations:.2f},{g.max_iterations},{secs},{g.log_mean_relative_error:.4f}", file=out)
        if g.mean_psnr is not None:
            print(f"#   mean PSNR {g.mean_psnr:.3f} (natural log), {g.mean_psnr_db:.3f} dB", file=out)
    if spec.output_path:
        print(f"# wrote {spec.output_path}", file=out)
    return 0


def _spec_from(kind, args, **grid):
    kwargs = dict(kind=kind, **grid)
    for key, value in _overrides(args).items():
        if value is not None:
            kwargs[key] = value
    return ExperimentSpec(**kwargs)


def main(argv=None, out=None):
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        if args.command == "solve":
            return cmd_solve(args, out)
        if args.command == "bench":
            spec = load_config(args.config, **_overrides(args))
        elif args.command == "grid":
            spec = _spec_from("phase_grid", args, n=args.n, m=args.m, s=args.s,
                              sigma=args.sigma, methods=args.methods)
        else:
            s = args.s if args.s is not None else max(1, int(0.01 * args.n))
            spec = _spec_from("wavelet_1d", args, n=(args.n,), m=(args.m,), s=(s,),
                              sigma=(args.sigma,), levels=args.levels, nnz=args.nnz)
        return _report(spec, args.workers, out)
    except (ValueError, OSError) as exc:
        print(f"sparsepr: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
