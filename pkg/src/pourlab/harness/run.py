"""Sweep execution: training jobs, evaluations, classification, summaries.

The sweep trains one policy per (grid cell, seed) on a worker pool, then
evaluates every policy for a fixed set of eval seeds, extracts features,
classifies them, and aggregates per-cell majorities. All result files are
pure functions of the configuration, so reruns and different worker counts
produce byte-identical CSVs: jobs write to disjoint paths, and every output
is emitted by the parent in canonical (config index, seed, episode) order.
"""

from __future__ import annotations

import csv
import functools
import os
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass

import numpy as np

from ..behavior.classify import BehaviorLabel, aggregate, classify, load_overrides
from ..behavior.features import BehaviorFeatures, extract_features
from ..behavior.log import rollout_trajectory, write_jsonl
from ..errors import ConfigError, FormatError, UsageError
from ..ppo.artifact import load_policy, save_policy
from ..ppo.trainer import evaluate_policy, ppo_config_to_dict, train
from ..rewards import (
    RewardWeights,
    baseline_grid_index,
    build_weight_grid,
    per_step_reward,
)
from ..sim.env import PourEnv
from .config import SweepConfig
from . import manifest as mf

FEATURES_FILE = "features.csv"
LABELS_FILE = "labels.csv"
SUMMARY_FILE = "summary.csv"
PLOT_FILE = "grid.svg"
MANIFEST_FILE = "manifest.json"
CONFIG_SNAPSHOT = "config.ini"

FEATURE_COLUMNS = (
    "config_id", "config_index", "w_t", "w_a", "w_e", "seed", "episode",
    "eval_seed", "steps", "fill_ratio", "spill_ratio", "rim_ratio",
    "unreleased_ratio", "time_to_target", "effort_total",
    "oscillation_count", "landing_spread", "emission_ongoing_at_horizon",
)

LABEL_COLUMNS = ("config_id", "config_index", "seed", "episode", "label", "overridden")

SUMMARY_COLUMNS = (
    "config_id", "config_index", "w_t", "w_e", "majority_label", "category",
    "n_evals", "PourFast", "PourBase", "PourSlow", "RimCleaner", "Mixing",
    "Watering", "NoPolicy", "Excluded",
)

CURVE_COLUMNS = (
    "iteration", "env_steps", "episodes_finished", "mean_episode_return",
    "mean_episode_length", "loss", "policy_loss", "value_loss", "entropy",
    "approx_kl", "clip_fraction", "mean_log_std",
)

# Three-way coloring for the report grid: the original task achieved, a
# novel skill acquired instead, or no viable policy.
CATEGORY_ORIGINAL = "original"
CATEGORY_NOVEL = "novel"
CATEGORY_NONE = "none"

_LABEL_CATEGORY = {
    BehaviorLabel.POUR_FAST: CATEGORY_ORIGINAL,
    BehaviorLabel.POUR_BASE: CATEGORY_ORIGINAL,
    BehaviorLabel.POUR_SLOW: CATEGORY_ORIGINAL,
    BehaviorLabel.RIM_CLEANER: CATEGORY_NOVEL,
    BehaviorLabel.MIXING: CATEGORY_NOVEL,
    BehaviorLabel.WATERING: CATEGORY_NOVEL,
    BehaviorLabel.NO_POLICY: CATEGORY_NONE,
    BehaviorLabel.EXCLUDED: CATEGORY_NONE,
}


def label_category(label: BehaviorLabel) -> str:
    return _LABEL_CATEGORY[label]


def config_id(index: int) -> str:
    return f"cfg{index:02d}"


def _fmt(value) -> str:
    """Deterministic CSV cell rendering (shortest float round-trip)."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path: str, columns: tuple, rows: list) -> None:
    """RFC-4180 CSV (CRLF, minimal quoting) with a header row."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row[c]) for c in columns])


def read_csv(path: str, columns: tuple) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or tuple(reader.fieldnames) != columns:
            raise FormatError(
                f"{path}: header {reader.fieldnames} does not match "
                f"expected columns {list(columns)}"
            )
        return [dict(row) for row in reader]


class MeanPolicy:
    """Deterministic evaluation policy: normalized obs -> mean action."""

    def __init__(self, ac, normalizer):
        self.ac = ac
        self.normalizer = normalizer

    def __call__(self, obs):
        return self.ac.policy_mean(self.normalizer.normalize(obs[None, :]))[0]


# ---------------------------------------------------------------------------
# Training jobs


def write_curve_csv(curve: list[dict], path: str) -> None:
    write_csv(path, CURVE_COLUMNS, curve)


def train_one(
    sweep_config: SweepConfig, index: int, seed: int, out_dir: str
) -> tuple[str, str]:
    """Train one (grid cell, seed) policy; returns (artifact, curve) paths."""
    grid = build_weight_grid(sweep_config.reward, sweep_config.mutation)
    if not 0 <= index < len(grid):
        raise UsageError(
            f"weight-grid index {index} out of range 0..{len(grid) - 1}"
        )
    weights = grid[index]
    rid = mf.run_id(index, seed)
    artifact_path = os.path.join(out_dir, "policies", f"{rid}.json")
    curve_path = os.path.join(out_dir, "curves", f"{rid}.csv")
    os.makedirs(os.path.dirname(artifact_path), exist_ok=True)
    os.makedirs(os.path.dirname(curve_path), exist_ok=True)

    env = PourEnv(sweep_config.env)
    reward_fn = functools.partial(per_step_reward, weights)
    result = train(env, reward_fn, sweep_config.ppo, seed=seed)

    metadata = {
        "config_index": index,
        "config_id": config_id(index),
        "seed": seed,
        "weights": {"w_a": weights.w_a, "w_t": weights.w_t, "w_e": weights.w_e},
        "ppo": ppo_config_to_dict(sweep_config.ppo),
        "env_steps": result.env_steps,
    }
    save_policy(artifact_path, result.ac, result.normalizer, metadata=metadata)
    write_curve_csv(result.curve, curve_path)
    return artifact_path, curve_path


def _train_worker(args) -> tuple[int, int, str | None]:
    """Pool entry point; returns (index, seed, error message or None)."""
    sweep_config, index, seed, out_dir = args
    try:
        train_one(sweep_config, index, seed, out_dir)
        return index, seed, None
    except Exception as exc:  # report, don't kill the pool
        return index, seed, f"{type(exc).__name__}: {exc}"


# ---------------------------------------------------------------------------
# Evaluation -> feature rows


@dataclass(frozen=True)
class EvalRecord:
    """One evaluation episode: identifiers plus extracted features."""

    config_index: int
    seed: int
    episode: int
    eval_seed: int
    steps: int
    weights: RewardWeights
    features: BehaviorFeatures


def evaluate_artifact(
    sweep_config: SweepConfig,
    artifact_path: str,
    index: int,
    seed: int,
    weights: RewardWeights,
    episodes: int | None = None,
    log_dir: str | None = None,
) -> list[EvalRecord]:
    """Run deterministic evaluations of one stored policy.

    Episode k uses eval seed ``eval_seed_base + k`` — the same initial
    conditions for every policy, so cells are compared on equal footing.
    With ``log_dir`` set, each episode's TrajectoryLog is written as JSONL.
    """
    ac, normalizer, _meta = load_policy(artifact_path)
    policy = MeanPolicy(ac, normalizer)
    n_episodes = sweep_config.evals_per_policy if episodes is None else episodes
    records = []
    for episode in range(n_episodes):
        eval_seed = sweep_config.eval_seed_base + episode
        env = PourEnv(sweep_config.env)
        log = rollout_trajectory(env, policy, seed=eval_seed)
        features = extract_features(log, sweep_config.env)
        if log_dir is not None:
            os.makedirs(log_dir, exist_ok=True)
            stem = os.path.splitext(os.path.basename(artifact_path))[0]
            write_jsonl(log, os.path.join(log_dir, f"{stem}_ep{episode:02d}.jsonl"))
        records.append(
            EvalRecord(
                config_index=index, seed=seed, episode=episode,
                eval_seed=eval_seed, steps=log.steps, weights=weights,
                features=features,
            )
        )
    return records


def feature_row(record: EvalRecord) -> dict:
    f = record.features
    return {
        "config_id": config_id(record.config_index),
        "config_index": record.config_index,
        "w_t": record.weights.w_t,
        "w_a": record.weights.w_a,
        "w_e": record.weights.w_e,
        "seed": record.seed,
        "episode": record.episode,
        "eval_seed": record.eval_seed,
        "steps": record.steps,
        "fill_ratio": f.fill_ratio,
        "spill_ratio": f.spill_ratio,
        "rim_ratio": f.rim_ratio,
        "unreleased_ratio": f.unreleased_ratio,
        "time_to_target": f.time_to_target,
        "effort_total": f.effort_total,
        "oscillation_count": f.oscillation_count,
        "landing_spread": f.landing_spread,
        "emission_ongoing_at_horizon": f.emission_ongoing_at_horizon,
    }


def parse_feature_row(row: dict) -> dict:
    """Invert feature_row's string rendering."""
    try:
        parsed = dict(row)
        for key in ("config_index", "seed", "episode", "eval_seed", "steps",
                    "oscillation_count"):
            parsed[key] = int(row[key])
        for key in ("w_t", "w_a", "w_e", "fill_ratio", "spill_ratio",
                    "rim_ratio", "unreleased_ratio", "effort_total",
                    "landing_spread"):
            parsed[key] = float(row[key])
        parsed["time_to_target"] = (
            None if row["time_to_target"] == "" else float(row["time_to_target"])
        )
        parsed["emission_ongoing_at_horizon"] = (
            row["emission_ongoing_at_horizon"] == "true"
        )
        return parsed
    except (KeyError, ValueError) as exc:
        raise FormatError(f"malformed features row {row}: {exc}") from exc


def features_from_row(parsed: dict) -> BehaviorFeatures:
    return BehaviorFeatures(
        fill_ratio=parsed["fill_ratio"],
        spill_ratio=parsed["spill_ratio"],
        rim_ratio=parsed["rim_ratio"],
        unreleased_ratio=parsed["unreleased_ratio"],
        time_to_target=parsed["time_to_target"],
        effort_total=parsed["effort_total"],
        oscillation_count=parsed["oscillation_count"],
        landing_spread=parsed["landing_spread"],
        emission_ongoing_at_horizon=parsed["emission_ongoing_at_horizon"],
    )


# ---------------------------------------------------------------------------
# Classification stage


def baseline_time_median(parsed_rows: list[dict], baseline_index: int) -> float:
    """Median time-to-target of the baseline cell's successful evals.

    Falls back to all cells if the baseline never succeeded; the placeholder
    1.0 is returned only when no row anywhere recorded a time, in which case
    the pour branch is unreachable and the median is never consulted.
    """
    base_times = [
        r["time_to_target"] for r in parsed_rows
        if r["config_index"] == baseline_index and r["time_to_target"] is not None
    ]
    if base_times:
        return float(np.median(base_times))
    all_times = [
        r["time_to_target"] for r in parsed_rows if r["time_to_target"] is not None
    ]
    if all_times:
        return float(np.median(all_times))
    return 1.0


def classify_rows(
    parsed_rows: list[dict],
    sweep_config: SweepConfig,
    overrides: dict | None = None,
) -> list[dict]:
    """Label every feature row; returns label rows in canonical order."""
    overrides = overrides or {}
    base_index = baseline_grid_index(sweep_config.mutation)
    median = baseline_time_median(parsed_rows, base_index)
    label_rows = []
    ordered = sorted(
        parsed_rows, key=lambda r: (r["config_index"], r["seed"], r["episode"])
    )
    for row in ordered:
        features = features_from_row(row)
        label = classify(features, sweep_config.classifier, median)
        key = (row["config_id"], row["seed"], row["episode"])
        overridden = key in overrides
        if overridden:
            label = overrides[key]
        label_rows.append(
            {
                "config_id": row["config_id"],
                "config_index": row["config_index"],
                "seed": row["seed"],
                "episode": row["episode"],
                "label": label.value,
                "overridden": overridden,
            }
        )
    return label_rows


def classify_stage(out_dir: str, sweep_config: SweepConfig,
                   overrides_path: str | None = None) -> list[dict]:
    features_path = os.path.join(out_dir, FEATURES_FILE)
    if not os.path.exists(features_path):
        raise UsageError(f"no {FEATURES_FILE} in {out_dir}; run eval or sweep first")
    raw_rows = read_csv(features_path, FEATURE_COLUMNS)
    parsed = [parse_feature_row(r) for r in raw_rows]
    overrides = load_overrides(overrides_path) if overrides_path else None
    label_rows = classify_rows(parsed, sweep_config, overrides)
    write_csv(os.path.join(out_dir, LABELS_FILE), LABEL_COLUMNS, label_rows)
    return label_rows


# ---------------------------------------------------------------------------
# Summary stage


def summarize_labels(
    label_rows: list[dict], grid: list[RewardWeights]
) -> list[dict]:
    """Aggregate per-eval labels into one majority row per labeled cell."""
    if not label_rows:
        raise UsageError("no labels to summarize")
    by_config: dict[int, list[BehaviorLabel]] = {}
    for row in label_rows:
        index = int(row["config_index"])
        if not 0 <= index < len(grid):
            raise FormatError(
                f"label row references config {index}, grid has {len(grid)} cells"
            )
        by_config.setdefault(index, []).append(BehaviorLabel(row["label"]))

    summary_rows = []
    for index in sorted(by_config):
        labels = by_config[index]
        majority, histogram = aggregate(labels)
        row = {
            "config_id": config_id(index),
            "config_index": index,
            "w_t": grid[index].w_t,
            "w_e": grid[index].w_e,
            "majority_label": majority.value,
            "category": label_category(majority),
            "n_evals": len(labels),
        }
        for label in BehaviorLabel:
            row[label.value] = histogram.get(label.value, 0)
        summary_rows.append(row)
    return summary_rows


def report_stage(out_dir: str, grid: list[RewardWeights]) -> list[dict]:
    from .report import render_grid_svg  # local import: keep run.py light

    labels_path = os.path.join(out_dir, LABELS_FILE)
    if not os.path.exists(labels_path):
        raise UsageError(f"no {LABELS_FILE} in {out_dir}; run classify first")
    label_rows = read_csv(labels_path, LABEL_COLUMNS)
    summary_rows = summarize_labels(label_rows, grid)
    svg = render_grid_svg(summary_rows)  # render first: no partial output on error
    write_csv(os.path.join(out_dir, SUMMARY_FILE), SUMMARY_COLUMNS, summary_rows)
    with open(os.path.join(out_dir, PLOT_FILE), "w") as fh:
        fh.write(svg)
    return summary_rows


# ---------------------------------------------------------------------------
# Sweep orchestration


def run_sweep(sweep_config: SweepConfig, out_dir: str,
              overrides_path: str | None = None) -> dict:
    """Full protocol: train grid x seeds, evaluate, classify, summarize.

    Resumable: a manifest in ``out_dir`` from the same configuration causes
    completed runs to be skipped; a manifest from a different configuration
    is an error.
    """
    from .config import write_sweep_config  # local import: avoid cycle

    os.makedirs(out_dir, exist_ok=True)
    grid = build_weight_grid(sweep_config.reward, sweep_config.mutation)
    digest = mf.config_digest(sweep_config)
    manifest_path = os.path.join(out_dir, MANIFEST_FILE)

    if os.path.exists(manifest_path):
        manifest = mf.load_manifest(manifest_path)
        mf.check_resume_compatible(manifest, sweep_config, digest)
    else:
        manifest = mf.build_manifest(sweep_config, digest)
    write_sweep_config(sweep_config, os.path.join(out_dir, CONFIG_SNAPSHOT))
    mf.save_manifest(manifest, manifest_path)  # written before training starts

    jobs = [
        (index, seed)
        for index in range(len(grid))
        for seed in range(sweep_config.seeds_per_config)
    ]
    pending = [
        (index, seed) for index, seed in jobs
        if not mf.run_is_complete(manifest, mf.run_id(index, seed), out_dir)
    ]

    failures = []
    if pending:
        for index, seed in pending:
            mf.mark_started(manifest, mf.run_id(index, seed))
        mf.save_manifest(manifest, manifest_path)
        args = [(sweep_config, index, seed, out_dir) for index, seed in pending]
        if sweep_config.workers == 1:
            results = map(_train_worker, args)
            for index, seed, error in results:
                _record_result(manifest, manifest_path, out_dir, index, seed, error,
                               failures)
        else:
            with ProcessPoolExecutor(max_workers=sweep_config.workers) as pool:
                futures = [pool.submit(_train_worker, a) for a in args]
                for future in as_completed(futures):
                    index, seed, error = future.result()
                    _record_result(manifest, manifest_path, out_dir, index, seed,
                                   error, failures)
    if failures:
        raise RuntimeError(
            f"{len(failures)} training run(s) failed: "
            + "; ".join(f"{mf.run_id(i, s)}: {e}" for i, s, e in failures)
        )

    # Evaluation in canonical order; outputs are order-exact by construction.
    records = []
    for index, seed in jobs:
        rid = mf.run_id(index, seed)
        artifact_path = os.path.join(out_dir, manifest["runs"][rid]["artifact"])
        records.extend(
            evaluate_artifact(
                sweep_config, artifact_path, index, seed, grid[index]
            )
        )
    feature_rows = [feature_row(r) for r in records]
    write_csv(os.path.join(out_dir, FEATURES_FILE), FEATURE_COLUMNS, feature_rows)

    label_rows = classify_stage(out_dir, sweep_config, overrides_path)
    summary_rows = report_stage(out_dir, grid)
    return {
        "manifest": manifest,
        "features": feature_rows,
        "labels": label_rows,
        "summary": summary_rows,
    }


def _record_result(manifest, manifest_path, out_dir, index, seed, error, failures):
    rid = mf.run_id(index, seed)
    if error is None:
        artifact_path = os.path.join(out_dir, manifest["runs"][rid]["artifact"])
        mf.mark_done(manifest, rid, mf.sha256_of_file(artifact_path))
    else:
        mf.mark_failed(manifest, rid, error)
        failures.append((index, seed, error))
    mf.save_manifest(manifest, manifest_path)
