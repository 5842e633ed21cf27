"""Tests for the sweep harness: config I/O, manifest, runner, CLI, reports.

Oracles:
- [DERIVED] round trips (INI, CSV, manifest) compared field-for-field;
  hand-built label files with known majorities; byte-identical reruns.
- [TRIVIAL] validation rejects, exit codes, file-layout contracts.

Training here uses a micro budget (hundreds of steps, tiny nets, short
horizon): the harness logic under test is identical at any budget.
"""

import dataclasses
import json
import os

import numpy as np
import pytest

from pourlab.behavior.classify import BehaviorLabel
from pourlab.errors import ConfigError, FormatError, UsageError
from pourlab.harness import manifest as mf
from pourlab.harness import run as rn
from pourlab.harness.cli import main
from pourlab.harness.config import (
    SweepConfig,
    apply_ci_profile,
    load_sweep_config,
    render_sweep_config,
    write_sweep_config,
)
from pourlab.harness.report import render_grid_svg
from pourlab.ppo.trainer import PPOConfig
from pourlab.rewards import build_weight_grid
from pourlab.sim.config import EnvConfig


def micro_sweep_config(**overrides) -> SweepConfig:
    """Smallest config that still exercises every pipeline stage."""
    env = dataclasses.replace(EnvConfig(), horizon=250)
    ppo = PPOConfig(
        total_steps=512, rollout_steps=256, minibatch_size=64, epochs=2,
        hidden=(16,),
    )
    return SweepConfig(
        env=env, ppo=ppo, seeds_per_config=1, evals_per_policy=1,
        **overrides,
    ).validate()


@pytest.fixture(scope="module")
def micro_config():
    return micro_sweep_config()


@pytest.fixture(scope="module")
def sweep_tree(micro_config, tmp_path_factory):
    """One completed micro sweep, shared by read-only assertions."""
    out_dir = str(tmp_path_factory.mktemp("sweep") / "run")
    outcome = rn.run_sweep(micro_config, out_dir)
    return out_dir, outcome


# ---------------------------------------------------------------------------
# Config file round trip


def test_config_round_trip(tmp_path):
    original = SweepConfig(
        env=dataclasses.replace(EnvConfig(), horizon=123, particle_count=50),
        ppo=PPOConfig(total_steps=2048, hidden=(32, 16), entropy_coef=0.01),
        seeds_per_config=2,
        evals_per_policy=4,
        workers=3,
        out_dir="runs/custom",
        eval_seed_base=777,
    )
    path = str(tmp_path / "config.ini")
    write_sweep_config(original, path)
    loaded = load_sweep_config(path)
    assert loaded == original


def test_config_defaults_when_keys_omitted(tmp_path):
    path = tmp_path / "partial.ini"
    path.write_text("[ppo]\ntotal_steps = 4096\n")
    loaded = load_sweep_config(str(path))
    assert loaded.ppo.total_steps == 4096
    defaults = SweepConfig()
    assert loaded.env == defaults.env
    assert loaded.reward == defaults.reward
    assert loaded.ppo.entropy_coef == defaults.ppo.entropy_coef


def test_config_comments_and_tuples(tmp_path):
    path = tmp_path / "config.ini"
    path.write_text(
        "# a comment\n"
        "[env]\n"
        "home_angles = 1.0, -0.5, -0.6  # inline comment\n"
        "[mutation]\n"
        "grid_offsets = -1, 0, 1\n"
    )
    loaded = load_sweep_config(str(path))
    assert loaded.env.home_angles == (1.0, -0.5, -0.6)
    assert loaded.mutation.grid_offsets == (-1.0, 0.0, 1.0)


@pytest.mark.parametrize(
    "content, fragment",
    [
        ("[ppo]\nlerning_rate = 0.01\n", "unknown key"),
        ("[nonsense]\nx = 1\n", "unknown section"),
        ("[ppo]\ntotal_steps = many\n", "cannot parse"),
        ("[sweep]\nseeds_per_config = 0\n", "seeds_per_config"),
    ],
)
def test_config_rejects(tmp_path, content, fragment):
    path = tmp_path / "bad.ini"
    path.write_text(content)
    with pytest.raises(ConfigError, match=fragment):
        load_sweep_config(str(path))


def test_config_missing_file():
    with pytest.raises(ConfigError, match="not found"):
        load_sweep_config("/nonexistent/config.ini")


def test_ci_profile_shrinks_budget_only():
    base = SweepConfig()
    ci = apply_ci_profile(base)
    assert ci.ppo.total_steps < base.ppo.total_steps
    assert ci.seeds_per_config == 1
    assert ci.evals_per_policy == 2
    # Physics, reward, and classifier untouched.
    assert ci.env == base.env
    assert ci.reward == base.reward
    assert ci.classifier == base.classifier


@pytest.mark.parametrize(
    "kw",
    [
        {"seeds_per_config": 0},
        {"evals_per_policy": 0},
        {"workers": 0},
        {"out_dir": ""},
        {"eval_seed_base": -1},
    ],
)
def test_sweep_config_validation(kw):
    with pytest.raises(ConfigError):
        SweepConfig(**kw).validate()


# ---------------------------------------------------------------------------
# Manifest


def test_manifest_round_trip(micro_config, tmp_path):
    digest = mf.config_digest(micro_config)
    manifest = mf.build_manifest(micro_config, digest)
    path = str(tmp_path / "manifest.json")
    mf.save_manifest(manifest, path)
    loaded = mf.load_manifest(path)
    assert loaded["config_sha256"] == digest
    assert len(loaded["grid"]) == 25
    assert loaded["seeds"] == [0]
    assert len(loaded["runs"]) == 25
    assert mf.manifest_grid(loaded) == build_weight_grid(
        micro_config.reward, micro_config.mutation
    )
    # Baseline cell is recorded verbatim.
    assert loaded["grid"][12] == {"w_a": 1.0, "w_t": 4.0, "w_e": 0.2}


@pytest.mark.parametrize(
    "mutator, fragment",
    [
        (lambda d: d.pop("grid"), "missing field 'grid'"),
        (lambda d: d.update(format="other"), "format"),
        (lambda d: d.update(version=99), "version"),
    ],
)
def test_manifest_rejects_malformed(micro_config, tmp_path, mutator, fragment):
    manifest = mf.build_manifest(micro_config, "x" * 64)
    mutator(manifest)
    path = str(tmp_path / "manifest.json")
    with open(path, "w") as fh:
        json.dump(manifest, fh)
    with pytest.raises(FormatError, match=fragment):
        mf.load_manifest(path)


def test_manifest_rejects_garbage_json(tmp_path):
    path = tmp_path / "manifest.json"
    path.write_text("{broken")
    with pytest.raises(FormatError, match="not valid JSON"):
        mf.load_manifest(str(path))


def test_config_digest_tracks_semantics(micro_config):
    same = micro_sweep_config()
    assert mf.config_digest(micro_config) == mf.config_digest(same)
    other = dataclasses.replace(
        micro_config, reward=dataclasses.replace(micro_config.reward, w_e=0.3)
    )
    assert mf.config_digest(micro_config) != mf.config_digest(other)


def test_resume_compatibility_checks(micro_config):
    digest = mf.config_digest(micro_config)
    manifest = mf.build_manifest(micro_config, digest)
    mf.check_resume_compatible(manifest, micro_config, digest)  # no raise
    with pytest.raises(ConfigError, match="different configuration"):
        mf.check_resume_compatible(manifest, micro_config, "0" * 64)
    more_seeds = dataclasses.replace(micro_config, seeds_per_config=2)
    with pytest.raises(ConfigError, match="seeds"):
        mf.check_resume_compatible(manifest, more_seeds, digest)


# ---------------------------------------------------------------------------
# Training + evaluation plumbing (micro budget)


def test_train_one_writes_artifact_and_curve(micro_config, tmp_path):
    out = str(tmp_path)
    artifact, curve = rn.train_one(micro_config, 12, 0, out)
    assert os.path.exists(artifact) and os.path.exists(curve)
    header = open(curve).readline().strip()
    assert header == ",".join(rn.CURVE_COLUMNS)
    # Determinism: identical bytes on retrain.
    first_artifact = open(artifact, "rb").read()
    first_curve = open(curve, "rb").read()
    rn.train_one(micro_config, 12, 0, out)
    assert open(artifact, "rb").read() == first_artifact
    assert open(curve, "rb").read() == first_curve


def test_train_one_rejects_bad_index(micro_config, tmp_path):
    with pytest.raises(UsageError, match="out of range"):
        rn.train_one(micro_config, 25, 0, str(tmp_path))


def test_evaluate_artifact_deterministic(micro_config, tmp_path):
    out = str(tmp_path)
    artifact, _ = rn.train_one(micro_config, 12, 0, out)
    grid = build_weight_grid(micro_config.reward, micro_config.mutation)
    kw = dict(index=12, seed=0, weights=grid[12], episodes=3)
    records1 = rn.evaluate_artifact(micro_config, artifact, **kw)
    records2 = rn.evaluate_artifact(micro_config, artifact, **kw)
    assert len(records1) == 3  # episode count honored exactly
    assert records1 == records2
    assert [r.eval_seed for r in records1] == [10_000, 10_001, 10_002]


def test_evaluate_artifact_writes_jsonl(micro_config, tmp_path):
    out = str(tmp_path)
    artifact, _ = rn.train_one(micro_config, 0, 0, out)
    grid = build_weight_grid(micro_config.reward, micro_config.mutation)
    log_dir = os.path.join(out, "trajectories")
    rn.evaluate_artifact(
        micro_config, artifact, 0, 0, grid[0], episodes=2, log_dir=log_dir
    )
    names = sorted(os.listdir(log_dir))
    assert names == ["cfg00_seed0_ep00.jsonl", "cfg00_seed0_ep01.jsonl"]


def test_feature_row_round_trip():
    from pourlab.behavior.features import BehaviorFeatures
    from pourlab.rewards import RewardWeights

    record = rn.EvalRecord(
        config_index=7, seed=2, episode=3, eval_seed=10_003, steps=412,
        weights=RewardWeights(w_a=1.0, w_t=3.0, w_e=0.25),
        features=BehaviorFeatures(
            fill_ratio=0.9, spill_ratio=0.05, rim_ratio=0.0,
            unreleased_ratio=0.05, time_to_target=None, effort_total=1.25,
            oscillation_count=2, landing_spread=0.01,
            emission_ongoing_at_horizon=True,
        ),
    )
    row = rn.feature_row(record)
    rendered = {k: rn._fmt(v) for k, v in row.items()}
    parsed = rn.parse_feature_row(rendered)
    assert parsed["time_to_target"] is None
    assert parsed["emission_ongoing_at_horizon"] is True
    assert rn.features_from_row(parsed) == record.features


def test_parse_feature_row_rejects_malformed():
    row = {c: "" for c in rn.FEATURE_COLUMNS}
    with pytest.raises(FormatError, match="malformed features row"):
        rn.parse_feature_row(row)


# ---------------------------------------------------------------------------
# Classification + summary stages on synthetic data


def parsed_row(index, seed, episode, **feature_kw):
    base = dict(
        fill_ratio=0.0, spill_ratio=0.0, rim_ratio=0.0, unreleased_ratio=1.0,
        time_to_target=None, effort_total=0.1, oscillation_count=0,
        landing_spread=0.0, emission_ongoing_at_horizon=False,
    )
    base.update(feature_kw)
    return {
        "config_id": rn.config_id(index), "config_index": index,
        "w_t": 4.0, "w_a": 1.0, "w_e": 0.2, "seed": seed, "episode": episode,
        "eval_seed": 10_000 + episode, "steps": 500, **base,
    }


def test_baseline_time_median():
    rows = [
        parsed_row(12, 0, 0, time_to_target=4.0, fill_ratio=0.9),
        parsed_row(12, 0, 1, time_to_target=6.0, fill_ratio=0.9),
        parsed_row(3, 0, 0, time_to_target=1.0, fill_ratio=0.9),
    ]
    assert rn.baseline_time_median(rows, 12) == 5.0
    # Baseline cell empty -> fall back to every cell.
    assert rn.baseline_time_median(rows[2:], 12) == 1.0
    # No times anywhere -> harmless placeholder.
    assert rn.baseline_time_median([parsed_row(0, 0, 0)], 12) == 1.0


def test_classify_rows_with_overrides(micro_config):
    rows = [
        parsed_row(12, 0, 0, fill_ratio=0.9, time_to_target=4.0),
        parsed_row(12, 0, 1, fill_ratio=0.9, time_to_target=4.1),
        parsed_row(4, 0, 0),
    ]
    plain = rn.classify_rows(rows, micro_config)
    assert [r["label"] for r in plain] == ["NoPolicy", "PourBase", "PourBase"]
    assert all(r["overridden"] is False for r in plain)
    overrides = {("cfg04", 0, 0): BehaviorLabel.RIM_CLEANER}
    relabeled = rn.classify_rows(rows, micro_config, overrides)
    by_key = {(r["config_id"], r["seed"], r["episode"]): r for r in relabeled}
    assert by_key[("cfg04", 0, 0)]["label"] == "RimCleaner"
    assert by_key[("cfg04", 0, 0)]["overridden"] is True
    assert by_key[("cfg12", 0, 0)]["label"] == "PourBase"


def label_row(index, seed, episode, label):
    return {
        "config_id": rn.config_id(index), "config_index": index,
        "seed": seed, "episode": episode, "label": label, "overridden": "false",
    }


def test_summarize_labels_known_majorities(micro_config):
    grid = build_weight_grid(micro_config.reward, micro_config.mutation)
    rows = (
        [label_row(0, 0, e, "PourBase") for e in range(6)]
        + [label_row(0, 0, e + 6, "Mixing") for e in range(4)]
        + [label_row(1, 0, e, "Excluded") for e in range(9)]
        + [label_row(1, 0, 9, "Watering")]
    )
    summary = rn.summarize_labels(rows, grid)
    assert len(summary) == 2
    cell0, cell1 = summary
    assert cell0["majority_label"] == "PourBase"
    assert cell0["category"] == "original"
    assert cell0["PourBase"] == 6 and cell0["Mixing"] == 4
    # Excluded evals are dropped before the majority.
    assert cell1["majority_label"] == "Watering"
    assert cell1["category"] == "novel"
    assert cell1["Excluded"] == 9


def test_summarize_labels_rejects(micro_config):
    grid = build_weight_grid(micro_config.reward, micro_config.mutation)
    with pytest.raises(UsageError):
        rn.summarize_labels([], grid)
    with pytest.raises(FormatError, match="references config"):
        rn.summarize_labels([label_row(99, 0, 0, "Mixing")], grid)


# ---------------------------------------------------------------------------
# SVG report


def summary_row(index, w_t, w_e, majority, category, n=3):
    row = {
        "config_id": rn.config_id(index), "config_index": index,
        "w_t": w_t, "w_e": w_e, "majority_label": majority,
        "category": category, "n_evals": n,
    }
    for label in BehaviorLabel:
        row[label.value] = n if label.value == majority else 0
    return row


def test_render_grid_svg_contents():
    rows = [
        summary_row(0, 2.0, 0.1, "PourBase", "original"),
        summary_row(1, 2.0, 0.2, "Watering", "novel"),
        summary_row(2, 4.0, 0.1, "NoPolicy", "none"),
        summary_row(3, 4.0, 0.2, "Excluded", "none"),
    ]
    svg = render_grid_svg(rows)
    assert svg.startswith('<?xml version="1.0"')
    assert 'xmlns="http://www.w3.org/2000/svg"' in svg and 'version="1.1"' in svg
    for text in ("PourBase", "Watering", "NoPolicy", "effort weight w_e",
                 "time weight w_t"):
        assert text in svg
    # All three category colors present.
    for color in ("#4878c9", "#58a55c", "#d24a43"):
        assert color in svg
    # Deterministic bytes.
    assert render_grid_svg(rows) == svg


def test_render_grid_svg_empty_rejected():
    with pytest.raises(UsageError):
        render_grid_svg([])


# ---------------------------------------------------------------------------
# Full micro sweep


def test_sweep_outputs_complete(sweep_tree, micro_config):
    out_dir, outcome = sweep_tree
    for name in (rn.FEATURES_FILE, rn.LABELS_FILE, rn.SUMMARY_FILE,
                 rn.PLOT_FILE, rn.MANIFEST_FILE, rn.CONFIG_SNAPSHOT):
        assert os.path.exists(os.path.join(out_dir, name)), name
    expected_rows = 25 * micro_config.seeds_per_config * micro_config.evals_per_policy
    assert len(outcome["features"]) == expected_rows
    assert len(outcome["labels"]) == expected_rows
    assert len(outcome["summary"]) == 25
    manifest = mf.load_manifest(os.path.join(out_dir, rn.MANIFEST_FILE))
    assert all(e["status"] == "done" for e in manifest["runs"].values())
    # Every artifact on disk is referenced with a matching hash.
    policies = sorted(os.listdir(os.path.join(out_dir, "policies")))
    assert len(policies) == 25
    for rid, entry in manifest["runs"].items():
        path = os.path.join(out_dir, entry["artifact"])
        assert mf.sha256_of_file(path) == entry["artifact_sha256"], rid


def test_sweep_features_csv_round_trip(sweep_tree):
    out_dir, outcome = sweep_tree
    raw = rn.read_csv(os.path.join(out_dir, rn.FEATURES_FILE), rn.FEATURE_COLUMNS)
    assert len(raw) == len(outcome["features"])
    parsed = [rn.parse_feature_row(r) for r in raw]
    for parsed_r, emitted in zip(parsed, outcome["features"]):
        for key in rn.FEATURE_COLUMNS:
            assert parsed_r[key] == emitted[key], key


def test_sweep_resume_skips_completed(micro_config, tmp_path):
    out_dir = str(tmp_path / "resume")
    rn.run_sweep(micro_config, out_dir)
    manifest = mf.load_manifest(os.path.join(out_dir, rn.MANIFEST_FILE))
    finished = {rid: e["finished_at"] for rid, e in manifest["runs"].items()}
    victim = mf.run_id(5, 0)
    os.unlink(os.path.join(out_dir, "policies", f"{victim}.json"))

    rn.run_sweep(micro_config, out_dir)
    after = mf.load_manifest(os.path.join(out_dir, rn.MANIFEST_FILE))
    retrained = [
        rid for rid, entry in after["runs"].items()
        if entry["finished_at"] != finished[rid]
    ]
    assert retrained == [victim]


def test_sweep_rejects_foreign_output_dir(sweep_tree, micro_config):
    out_dir, _ = sweep_tree
    other = dataclasses.replace(micro_config, evals_per_policy=2)
    with pytest.raises(ConfigError, match="different configuration"):
        rn.run_sweep(other, out_dir)


def test_sweep_worker_count_invariance(micro_config, sweep_tree, tmp_path):
    out1, _ = sweep_tree
    parallel = dataclasses.replace(micro_config, workers=2)
    out2 = str(tmp_path / "workers2")
    rn.run_sweep(parallel, out2)
    for name in (rn.FEATURES_FILE, rn.LABELS_FILE, rn.SUMMARY_FILE, rn.PLOT_FILE):
        a = open(os.path.join(out1, name), "rb").read()
        b = open(os.path.join(out2, name), "rb").read()
        assert a == b, name


# ---------------------------------------------------------------------------
# CLI (in-process main(); exit codes per the documented mapping)


@pytest.fixture()
def micro_ini(micro_config, tmp_path):
    path = str(tmp_path / "micro.ini")
    write_sweep_config(micro_config, path)
    return path


def test_cli_train_eval_classify_report(micro_ini, tmp_path):
    out = str(tmp_path / "cli_run")
    assert main(["--config", micro_ini, "--out", out,
                 "train", "--index", "12", "--seed", "0"]) == 0
    artifact = os.path.join(out, "policies", "cfg12_seed0.json")
    assert os.path.exists(artifact)
    assert main(["--config", micro_ini, "--out", out,
                 "eval", "--artifact", artifact, "--episodes", "2"]) == 0
    assert main(["--config", micro_ini, "--out", out, "classify"]) == 0
    assert main(["--config", micro_ini, "--out", out, "report"]) == 0
    assert os.path.exists(os.path.join(out, rn.SUMMARY_FILE))
    assert os.path.exists(os.path.join(out, rn.PLOT_FILE))
    # Rerun of report is byte-identical.
    svg = open(os.path.join(out, rn.PLOT_FILE), "rb").read()
    assert main(["--config", micro_ini, "--out", out, "report"]) == 0
    assert open(os.path.join(out, rn.PLOT_FILE), "rb").read() == svg


def test_cli_flags_accepted_after_subcommand(micro_ini, tmp_path):
    out = str(tmp_path / "flagged")
    assert main(["train", "--index", "12", "--seed", "0",
                 "--config", micro_ini, "--out", out]) == 0


def test_cli_exit_codes(micro_ini, tmp_path):
    out = str(tmp_path / "codes")
    # Usage error: grid index out of range.
    assert main(["--config", micro_ini, "--out", out,
                 "train", "--index", "25", "--seed", "0"]) == 2
    # Config error: missing config file.
    assert main(["--config", "/nonexistent.ini", "--out", out, "report"]) == 3
    # Usage error: reporting an empty tree.
    assert main(["--config", micro_ini, "--out", str(tmp_path / "empty"),
                 "report"]) == 2
    # Format error: corrupt artifact.
    bad = str(tmp_path / "bad.json")
    with open(bad, "w") as fh:
        fh.write("{}")
    assert main(["--config", micro_ini, "--out", out,
                 "eval", "--artifact", bad]) == 3


def test_cli_classify_with_overrides(micro_ini, tmp_path):
    out = str(tmp_path / "ovr")
    assert main(["--config", micro_ini, "--out", out,
                 "train", "--index", "0", "--seed", "0"]) == 0
    artifact = os.path.join(out, "policies", "cfg00_seed0.json")
    assert main(["--config", micro_ini, "--out", out,
                 "eval", "--artifact", artifact, "--episodes", "1"]) == 0
    overrides = str(tmp_path / "overrides.txt")
    with open(overrides, "w") as fh:
        fh.write("cfg00 0 0 RimCleaner\n")
    assert main(["--config", micro_ini, "--out", out,
                 "classify", "--overrides", overrides]) == 0
    labels = rn.read_csv(os.path.join(out, rn.LABELS_FILE), rn.LABEL_COLUMNS)
    assert labels[0]["label"] == "RimCleaner"
    assert labels[0]["overridden"] == "true"


def test_cli_init_config_round_trips(tmp_path):
    path = str(tmp_path / "default.ini")
    assert main(["init-config", path]) == 0
    assert load_sweep_config(path) == SweepConfig()
