"""Versioned JSON serialization of trained policies.

A policy artifact is a single JSON document carrying the network
architecture, the flat parameter vector, the observation-normalizer state
and free-form metadata (reward weights, seeds, training stats). Loading
validates structure and shapes and raises :class:`FormatError` naming the
offending field, so stale or foreign files fail loudly.
"""

from __future__ import annotations

import json
import os
import tempfile
from typing import Any

import numpy as np

from ..errors import FormatError
from .nets import ActorCritic
from .normalizer import RunningNormalizer

FORMAT_NAME = "pourlab-policy"
FORMAT_VERSION = 1


def save_policy(
    path: str,
    ac: ActorCritic,
    normalizer: RunningNormalizer,
    metadata: dict[str, Any] | None = None,
) -> None:
    """Write the artifact atomically (tmp file + rename)."""
    doc = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "obs_dim": ac.obs_dim,
        "act_dim": ac.act_dim,
        "hidden": list(ac.hidden),
        "params": ac.params.tolist(),
        "normalizer": normalizer.state_dict(),
        "metadata": metadata or {},
    }
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(doc, fh)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _require(doc: dict, field: str, kind: type) -> Any:
    if field not in doc:
        raise FormatError(f"policy artifact missing field '{field}'")
    value = doc[field]
    if not isinstance(value, kind):
        raise FormatError(
            f"policy artifact field '{field}' has wrong type "
            f"(expected {kind.__name__}, got {type(value).__name__})"
        )
    return value


def load_policy(path: str) -> tuple[ActorCritic, RunningNormalizer, dict[str, Any]]:
    """Read and validate an artifact; returns (actor-critic, normalizer, metadata)."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise FormatError(f"cannot read policy artifact {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"policy artifact {path!r} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise FormatError(f"policy artifact {path!r} must be a JSON object")

    fmt = _require(doc, "format", str)
    if fmt != FORMAT_NAME:
        raise FormatError(f"unexpected artifact format {fmt!r} (want {FORMAT_NAME!r})")
    version = _require(doc, "version", int)
    if version != FORMAT_VERSION:
        raise FormatError(f"unsupported artifact version {version} (supported: {FORMAT_VERSION})")
    obs_dim = _require(doc, "obs_dim", int)
    act_dim = _require(doc, "act_dim", int)
    hidden = tuple(_require(doc, "hidden", list))
    params = _require(doc, "params", list)
    norm_state = _require(doc, "normalizer", dict)
    metadata = _require(doc, "metadata", dict)

    ac = ActorCritic(obs_dim, act_dim, hidden=hidden)
    if len(params) != len(ac.params):
        raise FormatError(
            f"policy artifact field 'params' has length {len(params)}, "
            f"architecture needs {len(ac.params)}"
        )
    ac.params[:] = np.asarray(params, dtype=float)
    for field in ("mean", "var", "count"):
        if field not in norm_state:
            raise FormatError(f"policy artifact missing field 'normalizer.{field}'")
    if len(norm_state["mean"]) != obs_dim or len(norm_state["var"]) != obs_dim:
        raise FormatError("policy artifact field 'normalizer' does not match obs_dim")
    normalizer = RunningNormalizer.from_state_dict(norm_state, obs_dim)
    return ac, normalizer, metadata
