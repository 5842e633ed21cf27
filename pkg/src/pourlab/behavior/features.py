"""Feature extraction: quantify one trajectory for the behavior rubric."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import UsageError
from ..sim.config import EnvConfig
from .log import TrajectoryLog

SMOOTHING_WINDOW = 5  # moving-average window (samples) for the x-velocity


@dataclass(frozen=True)
class BehaviorFeatures:
    """Scalar description of one evaluation episode."""

    fill_ratio: float            # settled / total mass at episode end
    spill_ratio: float           # spilled outside (rim excluded) / total
    rim_ratio: float             # landed on the rim annulus / total
    unreleased_ratio: float      # still in the cup or in flight / total
    time_to_target: float | None  # first time settled mass >= target, s
    effort_total: float          # integral of sum(tau^2) dt over the episode
    oscillation_count: int       # x-direction reversals while emitting
    landing_spread: float        # std dev of landing x positions (m)
    emission_ongoing_at_horizon: bool


def smoothed_x_velocity(log: TrajectoryLog, dt: float) -> np.ndarray:
    """Moving-average (window 5) of the end-effector x velocity."""
    if len(log) < 2:
        return np.zeros(0)
    vel = np.diff(log.ee_x) / dt
    if len(vel) < SMOOTHING_WINDOW:
        return vel
    kernel = np.ones(SMOOTHING_WINDOW) / SMOOTHING_WINDOW
    return np.convolve(vel, kernel, mode="valid")


def count_oscillations(log: TrajectoryLog, dt: float) -> int:
    """Sign changes of the smoothed x velocity while emission is active.

    Each smoothed sample is gated by the emission flag at the center of its
    window; zero-velocity samples carry the previous sign.
    """
    smooth = smoothed_x_velocity(log, dt)
    if len(smooth) == 0:
        return 0
    # Smoothed sample i covers velocity samples i..i+W-1, i.e. rows
    # i..i+W; gate on the row at the window center.
    offset = min(SMOOTHING_WINDOW, len(log) - 1) // 2 + 1
    count = 0
    last_sign = 0
    for i, v in enumerate(smooth):
        row = min(i + offset, len(log) - 1)
        if not log.emitting[row]:
            continue
        sign = int(v > 0) - int(v < 0)
        if sign == 0:
            continue
        if last_sign != 0 and sign != last_sign:
            count += 1
        last_sign = sign
    return count


def extract_features(log: TrajectoryLog, config: EnvConfig) -> BehaviorFeatures:
    """Deterministic features for one log under the given env geometry."""
    if len(log) == 0:
        raise UsageError("cannot extract features from an empty log")
    total = config.total_mass
    fill = float(log.settled_mass[-1] / total)
    spill = float(log.spilled_mass[-1] / total)
    rim = float(log.rim_mass[-1] / total)
    unreleased = 1.0 - fill - spill - rim

    target_mass = config.target_count * config.particle_mass
    reached = np.nonzero(log.settled_mass >= target_mass)[0]
    time_to_target = float(log.elapsed[reached[0]]) if len(reached) else None

    effort_total = float(config.dt * np.sum(log.torques * log.torques))

    landings = [x for xs in log.landing_xs for x in xs]
    spread = float(np.std(landings)) if len(landings) >= 2 else 0.0

    ongoing = log.steps >= config.horizon and bool(log.emitting[-1])

    return BehaviorFeatures(
        fill_ratio=fill,
        spill_ratio=spill,
        rim_ratio=rim,
        unreleased_ratio=unreleased,
        time_to_target=time_to_target,
        effort_total=effort_total,
        oscillation_count=count_oscillations(log, config.dt),
        landing_spread=spread,
        emission_ongoing_at_horizon=ongoing,
    )
