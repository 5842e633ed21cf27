"""Train the baseline pouring policy on a few seeds and evaluate it.

This is the smallest real experiment: the unmutated reward weights
(w_a=1, w_t=4, w_e=0.2), the desk-scale PPO budget, and 10 deterministic
evaluation episodes per seed. Expect roughly 6-9 minutes per seed on one
CPU core. Artifacts land in <out>/policies/, learning curves in
<out>/curves/.
"""

import argparse
import time

from pourlab.harness.config import SweepConfig
from pourlab.harness.run import evaluate_artifact, train_one
from pourlab.rewards import baseline_grid_index, build_weight_grid


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="runs/baseline", help="output directory")
    parser.add_argument("--seeds", type=int, default=3, help="number of seeds")
    args = parser.parse_args()

    config = SweepConfig()
    index = baseline_grid_index(config.mutation)
    weights = build_weight_grid(config.reward, config.mutation)[index]
    print(f"baseline cell {index}: w_a={weights.w_a} w_t={weights.w_t} w_e={weights.w_e}")

    for seed in range(args.seeds):
        start = time.time()
        artifact, curve = train_one(config, index, seed, args.out)
        records = evaluate_artifact(config, artifact, index, seed, weights)
        ok = sum(
            r.features.fill_ratio >= 0.8 and r.features.spill_ratio <= 0.2
            for r in records
        )
        fills = sorted(r.features.fill_ratio for r in records)
        print(
            f"seed {seed}: {time.time() - start:.0f}s, "
            f"{ok}/{len(records)} successful evals, "
            f"median fill {fills[len(fills) // 2]:.2f} -> {artifact}"
        )


if __name__ == "__main__":
    main()
