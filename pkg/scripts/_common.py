"""Shared command line handling for the experiment scripts."""
import argparse
from pathlib import Path

from sparsepr.harness import load_config, run_experiment

CONFIGS = Path(__file__).resolve().parent / "configs"


def run(config_name, description):
    """Parse the usual flags, load ``configs/<config_name>.cfg`` and run it.

    Returns ``(spec, records, summaries)``.
    """
    p = argparse.ArgumentParser(description=description)
    p.add_argument("--config", default=str(CONFIGS / f"{config_name}.cfg"))
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None, help="CSV path (JSON summary is written next to it)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--no-clock", action="store_true")
    args = p.parse_args()
    spec = load_config(
        args.config,
        trials=args.trials,
        master_seed=args.seed,
        output_path=args.out,
        clock="none" if args.no_clock else None,
    )
    records, summaries = run_experiment(spec, workers=args.workers)
    if spec.output_path:
        print(f"# wrote {spec.output_path}")
    return spec, records, summaries
