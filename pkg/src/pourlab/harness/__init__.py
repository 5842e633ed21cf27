"""Experiment harness: sweep configuration, manifest, runner, CLI, reports."""

from .config import (
    DESK_PPO,
    SweepConfig,
    apply_ci_profile,
    load_sweep_config,
    render_sweep_config,
    write_sweep_config,
)
from .manifest import (
    build_manifest,
    check_resume_compatible,
    config_digest,
    load_manifest,
    manifest_grid,
    run_id,
    save_manifest,
)
from .run import (
    EvalRecord,
    MeanPolicy,
    evaluate_artifact,
    run_sweep,
    train_one,
)

__all__ = [
    "DESK_PPO",
    "SweepConfig",
    "apply_ci_profile",
    "load_sweep_config",
    "render_sweep_config",
    "write_sweep_config",
    "build_manifest",
    "check_resume_compatible",
    "config_digest",
    "load_manifest",
    "manifest_grid",
    "run_id",
    "save_manifest",
    "EvalRecord",
    "MeanPolicy",
    "evaluate_artifact",
    "run_sweep",
    "train_one",
]
