"""Run the full 25-configuration reward-mutation sweep.

Trains one policy per (weight cell, seed) at the desk-scale budget,
evaluates each on 10 fixed-seed episodes, classifies every evaluation,
and writes features.csv, labels.csv, summary.csv and grid.svg into the
output directory. The run is resumable: re-invoking with the same config
and output directory skips completed policies (the manifest is the
source of truth), so an interrupted sweep just continues.

Budget guide on one CPU core: about 6-9 minutes per policy, so 25 cells
x 3 seeds is an overnight run and --seeds 1 an afternoon one. --ci
shrinks training to seconds per policy for a pipeline smoke test.
"""

import argparse
import dataclasses

from pourlab.harness.config import SweepConfig, apply_ci_profile, load_sweep_config
from pourlab.harness.run import run_sweep


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--config", help="INI config file (defaults built in)")
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument("--seeds", type=int, default=None, help="seeds per config")
    parser.add_argument("--workers", type=int, default=None, help="parallel trainers")
    parser.add_argument("--ci", action="store_true", help="seconds-per-policy budget")
    args = parser.parse_args()

    config = load_sweep_config(args.config) if args.config else SweepConfig()
    if args.ci:
        config = apply_ci_profile(config)
    if args.seeds is not None:
        config = dataclasses.replace(config, seeds_per_config=args.seeds)
    if args.workers is not None:
        config = dataclasses.replace(config, workers=args.workers)
    out_dir = args.out if args.out is not None else config.out_dir

    outcome = run_sweep(config, out_dir)
    print(f"sweep complete: {len(outcome['features'])} evaluations -> {out_dir}")
    for row in outcome["summary"]:
        print(
            f"  {row['config_id']}  w_t={row['w_t']:<4} w_e={row['w_e']:<5} "
            f"-> {row['majority_label']} ({row['category']})"
        )


if __name__ == "__main__":
    main()
