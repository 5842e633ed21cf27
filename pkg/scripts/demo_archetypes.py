"""Roll the hand-scripted behavior archetypes and classify them.

No training involved: each archetype is a waypoint controller that
drives the arm through one qualitative behavior (the three pour speeds,
rim cleaning, mixing, watering, plus degenerate cases). The script
prints the extracted features next to the rubric's verdict, which makes
threshold tuning and classifier regressions easy to eyeball. Runs in a
few seconds.
"""

import argparse

import numpy as np

from pourlab.behavior.classify import ClassifierThresholds, classify
from pourlab.behavior.features import extract_features
from pourlab.behavior.log import rollout_trajectory, write_jsonl
from pourlab.sim import scripted
from pourlab.sim.config import EnvConfig
from pourlab.sim.env import PourEnv


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=0, help="episode seed")
    parser.add_argument("--save-logs", metavar="DIR", default=None,
                        help="also write one JSONL trajectory per archetype")
    args = parser.parse_args()

    config = EnvConfig()
    thresholds = ClassifierThresholds()

    logs = {}
    for name, factory in scripted.ARCHETYPES.items():
        env = PourEnv(config)
        logs[name] = rollout_trajectory(env, factory(config), seed=args.seed)
        if args.save_logs:
            write_jsonl(logs[name], f"{args.save_logs}/{name}.jsonl")

    features = {name: extract_features(log, config) for name, log in logs.items()}
    base_times = [features["pour_base"].time_to_target]
    median = float(np.median(base_times))

    header = (f"{'archetype':<14} {'fill':>5} {'spill':>6} {'rim':>5} "
              f"{'t2t':>6} {'osc':>4} {'spread':>7}  label")
    print(header)
    print("-" * len(header))
    for name, f in features.items():
        label = classify(f, thresholds, median)
        t2t = f"{f.time_to_target:.2f}" if f.time_to_target is not None else "-"
        print(
            f"{name:<14} {f.fill_ratio:>5.2f} {f.spill_ratio:>6.2f} "
            f"{f.rim_ratio:>5.2f} {t2t:>6} {f.oscillation_count:>4} "
            f"{f.landing_spread:>7.3f}  {label.value}"
        )


if __name__ == "__main__":
    main()
