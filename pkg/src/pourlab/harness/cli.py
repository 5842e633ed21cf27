"""Command-line interface: train / sweep / eval / classify / report.

Exit codes: 0 success, 2 usage error, 3 config or file-format error,
4 runtime failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys

from ..errors import ConfigError, FormatError, UsageError
from ..ppo.artifact import load_policy
from ..rewards import RewardWeights, build_weight_grid
from . import manifest as mf
from . import run as rn
from .config import (
    SweepConfig,
    apply_ci_profile,
    load_sweep_config,
    write_sweep_config,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_RUNTIME = 4


def _common_flags() -> argparse.ArgumentParser:
    """Global flags, accepted both before and after the subcommand.

    SUPPRESS defaults keep a subparser from clobbering a value the parent
    already parsed; read them with getattr(args, name, fallback).
    """
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", default=argparse.SUPPRESS,
                        help="sweep configuration INI (defaults apply if omitted)")
    common.add_argument("--out", metavar="DIR", default=argparse.SUPPRESS,
                        help="output directory (overrides [sweep] out_dir)")
    common.add_argument("--seed", type=int, metavar="N", default=argparse.SUPPRESS,
                        help="seed (train: run seed; eval: base eval seed)")
    common.add_argument("--workers", type=int, metavar="N",
                        default=argparse.SUPPRESS,
                        help="worker processes for sweep training jobs")
    common.add_argument("--ci", action="store_true", default=argparse.SUPPRESS,
                        help="shrink budgets to a minutes-scale CI profile")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = argparse.ArgumentParser(
        prog="pourlab",
        description="Desk-scale reward-mutation experiments on a 2-D pouring task.",
        parents=[common],
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", parents=[common],
                             help="train one (grid cell, seed) policy")
    p_train.add_argument("--index", type=int, required=True,
                         help="weight-grid index (0-24; 12 is the baseline)")

    sub.add_parser("sweep", parents=[common],
                   help="run the full grid sweep end to end")

    p_eval = sub.add_parser("eval", parents=[common],
                            help="evaluate a stored policy artifact")
    p_eval.add_argument("--artifact", required=True, help="policy artifact path")
    p_eval.add_argument("--episodes", type=int, default=None,
                        help="episode count (default: evals_per_policy)")

    p_classify = sub.add_parser("classify", parents=[common],
                                help="label feature rows in --out")
    p_classify.add_argument("--overrides", metavar="PATH", default=None,
                            help="manual label-override file")

    sub.add_parser("report", parents=[common],
                   help="aggregate labels into summary CSV + SVG")

    p_init = sub.add_parser("init-config", parents=[common],
                            help="write the default configuration INI")
    p_init.add_argument("path", help="where to write the INI file")

    return parser


def resolve_config(args) -> SweepConfig:
    config_path = getattr(args, "config", None)
    config = load_sweep_config(config_path) if config_path else SweepConfig()
    if getattr(args, "ci", False):
        config = apply_ci_profile(config)
    workers = getattr(args, "workers", None)
    if workers is not None:
        config = dataclasses.replace(config, workers=workers)
    return config.validate()


def resolve_out(args, config: SweepConfig) -> str:
    return getattr(args, "out", None) or config.out_dir


def cmd_train(args) -> int:
    config = resolve_config(args)
    out_dir = resolve_out(args, config)
    seed = getattr(args, "seed", None)
    seed = 0 if seed is None else seed
    digest = mf.config_digest(config)
    manifest_path = os.path.join(out_dir, rn.MANIFEST_FILE)

    os.makedirs(out_dir, exist_ok=True)
    if os.path.exists(manifest_path):
        manifest = mf.load_manifest(manifest_path)
        mf.check_resume_compatible(manifest, config, digest)
    else:
        manifest = mf.build_manifest(config, digest)
    rid = mf.run_id(args.index, seed)
    if rid not in manifest["runs"]:
        raise UsageError(
            f"run {rid} not in the manifest (grid has {len(manifest['grid'])} "
            f"cells, seeds {manifest['seeds']})"
        )
    mf.mark_started(manifest, rid)
    mf.save_manifest(manifest, manifest_path)

    artifact_path, curve_path = rn.train_one(config, args.index, seed, out_dir)
    mf.mark_done(manifest, rid, mf.sha256_of_file(artifact_path))
    mf.save_manifest(manifest, manifest_path)
    print(f"trained {rid}: artifact {artifact_path}, curve {curve_path}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    config = resolve_config(args)
    out_dir = resolve_out(args, config)
    outcome = rn.run_sweep(config, out_dir)
    print(
        f"sweep complete: {len(outcome['features'])} evaluations, "
        f"results in {out_dir}"
    )
    return EXIT_OK


def cmd_eval(args) -> int:
    config = resolve_config(args)
    out_dir = resolve_out(args, config)
    os.makedirs(out_dir, exist_ok=True)
    _ac, _norm, meta = load_policy(args.artifact)
    index = int(meta.get("config_index", 0))
    seed = int(meta.get("seed", 0))
    weights_doc = meta.get("weights", {})
    weights = RewardWeights(
        w_a=float(weights_doc.get("w_a", config.reward.w_a)),
        w_t=float(weights_doc.get("w_t", config.reward.w_t)),
        w_e=float(weights_doc.get("w_e", config.reward.w_e)),
    )
    eval_seed = getattr(args, "seed", None)
    if eval_seed is not None:
        config = dataclasses.replace(config, eval_seed_base=eval_seed)
    records = rn.evaluate_artifact(
        config, args.artifact, index, seed, weights,
        episodes=args.episodes,
        log_dir=os.path.join(out_dir, "trajectories"),
    )
    rows = [rn.feature_row(r) for r in records]
    features_path = os.path.join(out_dir, rn.FEATURES_FILE)
    existing = (
        rn.read_csv(features_path, rn.FEATURE_COLUMNS)
        if os.path.exists(features_path) else []
    )
    rn.write_csv(features_path, rn.FEATURE_COLUMNS, existing + rows)
    print(f"evaluated {len(rows)} episodes of {args.artifact} into {out_dir}")
    return EXIT_OK


def cmd_classify(args) -> int:
    config = resolve_config(args)
    out_dir = resolve_out(args, config)
    label_rows = rn.classify_stage(out_dir, config, args.overrides)
    print(f"labeled {len(label_rows)} evaluations into {out_dir}")
    return EXIT_OK


def cmd_report(args) -> int:
    config = resolve_config(args)
    out_dir = resolve_out(args, config)
    manifest_path = os.path.join(out_dir, rn.MANIFEST_FILE)
    if os.path.exists(manifest_path):
        grid = mf.manifest_grid(mf.load_manifest(manifest_path))
    else:
        grid = build_weight_grid(config.reward, config.mutation)
    summary_rows = rn.report_stage(out_dir, grid)
    print(f"wrote summary ({len(summary_rows)} cells) and plot into {out_dir}")
    return EXIT_OK


def cmd_init_config(args) -> int:
    config = resolve_config(args)
    write_sweep_config(config, args.path)
    print(f"wrote default configuration to {args.path}")
    return EXIT_OK


_COMMANDS = {
    "train": cmd_train,
    "sweep": cmd_sweep,
    "eval": cmd_eval,
    "classify": cmd_classify,
    "report": cmd_report,
    "init-config": cmd_init_config,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConfigError, FormatError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # runtime failure
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
