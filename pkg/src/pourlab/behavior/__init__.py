"""Trajectory logging, feature extraction, and behavior classification."""

from .classify import (
    PRIORITY,
    BehaviorLabel,
    ClassifierThresholds,
    aggregate,
    classify,
    load_overrides,
    parse_override_line,
)
from .features import (
    SMOOTHING_WINDOW,
    BehaviorFeatures,
    count_oscillations,
    extract_features,
    smoothed_x_velocity,
)
from .log import (
    JSONL_KEYS,
    TrajectoryLog,
    read_jsonl,
    record,
    rollout_trajectory,
    write_jsonl,
)

__all__ = [
    "PRIORITY",
    "BehaviorLabel",
    "ClassifierThresholds",
    "aggregate",
    "classify",
    "load_overrides",
    "parse_override_line",
    "SMOOTHING_WINDOW",
    "BehaviorFeatures",
    "count_oscillations",
    "extract_features",
    "smoothed_x_velocity",
    "JSONL_KEYS",
    "TrajectoryLog",
    "read_jsonl",
    "record",
    "rollout_trajectory",
    "write_jsonl",
]
