"""Run manifest: the sweep's single source of truth on disk.

One JSON document records the config hash, the baseline weights and
mutation spec, the full 25-entry weight grid, the seed list, and one entry
per (config, seed) training run with status, artifact paths, and hashes.
It is written before any training starts and rewritten atomically (temp
file + rename) after every run completes, so an interrupted sweep resumes
by skipping entries whose artifacts are present and hash-clean.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from datetime import datetime, timezone

from .. import __version__
from ..errors import ConfigError, FormatError
from ..rewards import MutationSpec, RewardWeights, build_weight_grid

FORMAT_NAME = "pourlab-manifest"
FORMAT_VERSION = 1

STATUS_PENDING = "pending"
STATUS_DONE = "done"
STATUS_FAILED = "failed"


def run_id(config_index: int, seed: int) -> str:
    return f"cfg{config_index:02d}_seed{seed}"


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def sha256_of_file(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def sha256_of_text(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def config_digest(sweep_config) -> str:
    """Hash of the canonical INI rendering, so formatting and comments in
    the user's file do not break resume while any semantic change does."""
    from .config import render_sweep_config  # local import: avoid cycle

    return sha256_of_text(render_sweep_config(sweep_config))


def _weights_doc(weights: RewardWeights) -> dict:
    return {"w_a": weights.w_a, "w_t": weights.w_t, "w_e": weights.w_e}


def _weights_from_doc(doc: dict) -> RewardWeights:
    return RewardWeights(w_a=doc["w_a"], w_t=doc["w_t"], w_e=doc["w_e"])


def build_manifest(sweep_config, config_sha: str) -> dict:
    """Fresh manifest with every (config, seed) run pending."""
    grid = build_weight_grid(sweep_config.reward, sweep_config.mutation)
    seeds = list(range(sweep_config.seeds_per_config))
    now = _utc_now()
    runs = {}
    for index in range(len(grid)):
        for seed in seeds:
            rid = run_id(index, seed)
            runs[rid] = {
                "config_index": index,
                "seed": seed,
                "status": STATUS_PENDING,
                "artifact": f"policies/{rid}.json",
                "curve": f"curves/{rid}.csv",
                "artifact_sha256": None,
                "started_at": None,
                "finished_at": None,
            }
    return {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "tool_version": __version__,
        "created_at": now,
        "updated_at": now,
        "config_sha256": config_sha,
        "baseline": _weights_doc(sweep_config.reward),
        "mutation": {
            "sigma_t": sweep_config.mutation.sigma_t,
            "sigma_e": sweep_config.mutation.sigma_e,
            "grid_offsets": list(sweep_config.mutation.grid_offsets),
        },
        "grid": [_weights_doc(w) for w in grid],
        "seeds": seeds,
        "runs": runs,
    }


def save_manifest(manifest: dict, path: str) -> None:
    """Atomic write: temp file in the same directory, then rename."""
    manifest["updated_at"] = _utc_now()
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(dir=directory, suffix=".manifest.tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(manifest, fh, indent=2)
            fh.write("\n")
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise


_REQUIRED_FIELDS = (
    "format", "version", "tool_version", "config_sha256", "baseline",
    "mutation", "grid", "seeds", "runs",
)


def load_manifest(path: str) -> dict:
    try:
        with open(path) as fh:
            manifest = json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(manifest, dict):
        raise FormatError(f"{path}: manifest must be a JSON object")
    for field in _REQUIRED_FIELDS:
        if field not in manifest:
            raise FormatError(f"{path}: manifest missing field {field!r}")
    if manifest["format"] != FORMAT_NAME:
        raise FormatError(
            f"{path}: format is {manifest['format']!r}, expected {FORMAT_NAME!r}"
        )
    if manifest["version"] != FORMAT_VERSION:
        raise FormatError(
            f"{path}: version {manifest['version']} unsupported "
            f"(expected {FORMAT_VERSION})"
        )
    return manifest


def manifest_grid(manifest: dict) -> list[RewardWeights]:
    return [_weights_from_doc(doc) for doc in manifest["grid"]]


def check_resume_compatible(manifest: dict, sweep_config, config_sha: str) -> None:
    """Refuse to resume into an output tree built from a different config.

    The grid check is exact: grid values are decimal-rounded at
    construction, so a JSON round trip preserves them bit-for-bit.
    """
    if manifest["config_sha256"] != config_sha:
        raise ConfigError(
            "output directory was produced by a different configuration "
            f"(manifest hash {manifest['config_sha256'][:12]}..., "
            f"current {config_sha[:12]}...); use a fresh --out directory"
        )
    expected = build_weight_grid(sweep_config.reward, sweep_config.mutation)
    if manifest_grid(manifest) != expected:
        raise ConfigError("manifest grid does not match the configured grid")
    if list(manifest["seeds"]) != list(range(sweep_config.seeds_per_config)):
        raise ConfigError(
            f"manifest seeds {manifest['seeds']} do not match "
            f"seeds_per_config={sweep_config.seeds_per_config}"
        )


def mark_started(manifest: dict, rid: str) -> None:
    manifest["runs"][rid]["started_at"] = _utc_now()


def mark_done(manifest: dict, rid: str, artifact_sha: str) -> None:
    entry = manifest["runs"][rid]
    entry["status"] = STATUS_DONE
    entry["artifact_sha256"] = artifact_sha
    entry["finished_at"] = _utc_now()


def mark_failed(manifest: dict, rid: str, message: str) -> None:
    entry = manifest["runs"][rid]
    entry["status"] = STATUS_FAILED
    entry["error"] = message
    entry["finished_at"] = _utc_now()


def run_is_complete(manifest: dict, rid: str, out_dir: str) -> bool:
    """Done status plus artifact present and hash-clean."""
    entry = manifest["runs"].get(rid)
    if entry is None or entry["status"] != STATUS_DONE:
        return False
    artifact_path = os.path.join(out_dir, entry["artifact"])
    if not os.path.exists(artifact_path):
        return False
    return sha256_of_file(artifact_path) == entry["artifact_sha256"]
