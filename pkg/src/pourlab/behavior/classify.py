"""Rule-based behavior classification and per-config aggregation.

The rubric turns the qualitative behavior taxonomy (pour variants, rim
cleaning, mixing, watering) into an explicit first-match-wins decision
table over :class:`BehaviorFeatures`. Thresholds are declared data so a
human can re-tune them, and a plain-text override file allows manual
re-labeling of individual evaluations.
"""

from __future__ import annotations

import enum
import math
from collections import Counter
from dataclasses import dataclass

from ..errors import ConfigError, FormatError
from .features import BehaviorFeatures


class BehaviorLabel(str, enum.Enum):
    POUR_FAST = "PourFast"
    POUR_BASE = "PourBase"
    POUR_SLOW = "PourSlow"
    RIM_CLEANER = "RimCleaner"
    MIXING = "Mixing"
    WATERING = "Watering"
    NO_POLICY = "NoPolicy"
    EXCLUDED = "Excluded"


# Tie-break priority: the rubric's decision order (pour split listed
# fast/base/slow). Earlier wins a majority tie.
PRIORITY = (
    BehaviorLabel.EXCLUDED,
    BehaviorLabel.WATERING,
    BehaviorLabel.RIM_CLEANER,
    BehaviorLabel.MIXING,
    BehaviorLabel.POUR_FAST,
    BehaviorLabel.POUR_BASE,
    BehaviorLabel.POUR_SLOW,
    BehaviorLabel.NO_POLICY,
)


@dataclass(frozen=True)
class ClassifierThresholds:
    """Tunable rubric boundaries.

    ``fast_time_factor``/``slow_time_factor`` cut the pour classes relative
    to the baseline median time-to-target; the defaults are sized so that a
    fast/slow contrast of roughly 5.5 s vs 7.5 s (ratio about 1.36) lands on
    opposite sides of the band. ``watering_spread_min`` defaults to twice
    the default container opening half-width.
    """

    fill_success: float = 0.8
    spill_max: float = 0.2
    fast_time_factor: float = 0.8
    slow_time_factor: float = 1.25
    rim_min: float = 0.3
    mixing_oscillations_min: int = 4
    watering_spread_min: float = 0.12

    def validate(self) -> "ClassifierThresholds":
        positive = {
            "fill_success": self.fill_success,
            "spill_max": self.spill_max,
            "fast_time_factor": self.fast_time_factor,
            "slow_time_factor": self.slow_time_factor,
            "rim_min": self.rim_min,
            "watering_spread_min": self.watering_spread_min,
        }
        for name, value in positive.items():
            if not (math.isfinite(value) and value > 0):
                raise ConfigError(f"{name} must be finite and > 0 (got {value})")
        if self.mixing_oscillations_min < 1:
            raise ConfigError(
                f"mixing_oscillations_min must be >= 1 (got {self.mixing_oscillations_min})"
            )
        if not self.fast_time_factor < self.slow_time_factor:
            raise ConfigError(
                f"fast_time_factor must be < slow_time_factor "
                f"(got {self.fast_time_factor} >= {self.slow_time_factor})"
            )
        return self


def classify(
    features: BehaviorFeatures,
    thresholds: ClassifierThresholds,
    baseline_time_median: float,
) -> BehaviorLabel:
    """First-match-wins rubric; total (NoPolicy is the default).

    Order: Excluded (in-progress at horizon), Watering (broad spread without
    task success), RimCleaner, Mixing (oscillating while still mostly
    filling), the three pour classes split by time against the baseline
    median, then NoPolicy.
    """
    t = thresholds.validate()
    if not (math.isfinite(baseline_time_median) and baseline_time_median > 0):
        raise ConfigError(
            f"baseline_time_median must be finite and > 0 (got {baseline_time_median})"
        )
    if features.emission_ongoing_at_horizon:
        return BehaviorLabel.EXCLUDED
    if features.landing_spread >= t.watering_spread_min and features.fill_ratio < t.fill_success:
        return BehaviorLabel.WATERING
    if features.rim_ratio >= t.rim_min:
        return BehaviorLabel.RIM_CLEANER
    if (
        features.oscillation_count >= t.mixing_oscillations_min
        and features.fill_ratio >= 0.5 * t.fill_success
    ):
        return BehaviorLabel.MIXING
    if (
        features.fill_ratio >= t.fill_success
        and features.spill_ratio <= t.spill_max
        and features.time_to_target is not None
    ):
        if features.time_to_target < t.fast_time_factor * baseline_time_median:
            return BehaviorLabel.POUR_FAST
        if features.time_to_target > t.slow_time_factor * baseline_time_median:
            return BehaviorLabel.POUR_SLOW
        return BehaviorLabel.POUR_BASE
    return BehaviorLabel.NO_POLICY


def aggregate(labels: list[BehaviorLabel]) -> tuple[BehaviorLabel, dict[str, int]]:
    """Majority label for one config, with the full histogram.

    Excluded evaluations are dropped before the majority; ties break toward
    the rubric's priority order. If every evaluation was excluded the
    config itself is Excluded.
    """
    histogram = Counter(label.value for label in labels)
    counted = [l for l in labels if l is not BehaviorLabel.EXCLUDED]
    if not counted:
        return BehaviorLabel.EXCLUDED, dict(histogram)
    counts = Counter(counted)
    best = max(counts.values())
    for label in PRIORITY:
        if counts.get(label, 0) == best:
            return label, dict(histogram)
    raise AssertionError("unreachable: some label must hold the maximum")


def parse_override_line(line: str) -> tuple[tuple[str, int, int], BehaviorLabel] | None:
    """Parse one override line: ``<config_id> <seed> <episode> <label>``.

    Returns None for blank lines and comments. Raises FormatError otherwise.
    """
    stripped = line.strip()
    if not stripped or stripped.startswith("#"):
        return None
    parts = stripped.split()
    if len(parts) != 4:
        raise FormatError(
            f"override line needs 'config_id seed episode label' (got {line!r})"
        )
    config_id, seed_s, episode_s, label_s = parts
    try:
        seed = int(seed_s)
        episode = int(episode_s)
    except ValueError as exc:
        raise FormatError(f"override seed/episode must be integers (got {line!r})") from exc
    try:
        label = BehaviorLabel(label_s)
    except ValueError as exc:
        valid = ", ".join(l.value for l in BehaviorLabel)
        raise FormatError(f"unknown label {label_s!r} (valid: {valid})") from exc
    return (config_id, seed, episode), label


def load_overrides(path: str) -> dict[tuple[str, int, int], BehaviorLabel]:
    """Read a label-override file; later lines win on duplicate keys."""
    overrides: dict[tuple[str, int, int], BehaviorLabel] = {}
    with open(path) as fh:
        for line in fh:
            parsed = parse_override_line(line)
            if parsed is not None:
                overrides[parsed[0]] = parsed[1]
    return overrides
