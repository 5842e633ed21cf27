"""Hand-written reference controllers for tests and classifier calibration.

Each controller is a callable mapping the environment observation to joint
torques, so it can be rolled out exactly like a trained policy. They track
time-indexed joint waypoints with a PD law, which is enough to realise each
behaviour archetype (fast/base/slow pours, rim targeting, in-place mixing,
sweeping watering, never pouring, still pouring at the horizon).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import EnvConfig


@dataclass(frozen=True)
class Wiggle:
    """Sinusoid added to one joint's target from ``start`` onward."""

    joint: int
    amplitude: float
    frequency: float  # Hz
    start: float = 0.0


class WaypointController:
    """PD tracking of piecewise-linear joint-angle waypoints.

    ``waypoints`` is a list of (time, angles) pairs with strictly increasing
    times; targets are held constant beyond the last waypoint. Gains are
    sized for the unit-inertia joints (roughly critically damped).
    """

    def __init__(
        self,
        config: EnvConfig,
        waypoints: list[tuple[float, tuple[float, float, float]]],
        wiggles: tuple[Wiggle, ...] = (),
        kp: float = 8.0,
        kd: float = 4.0,
    ):
        self.config = config
        self.times = np.array([t for t, _ in waypoints])
        self.targets = np.array([a for _, a in waypoints])
        self.wiggles = wiggles
        self.kp = kp
        self.kd = kd

    def target_at(self, t: float) -> np.ndarray:
        target = np.array(
            [np.interp(t, self.times, self.targets[:, j]) for j in range(3)]
        )
        for w in self.wiggles:
            if t >= w.start:
                target[w.joint] += w.amplitude * math.sin(
                    2.0 * math.pi * w.frequency * (t - w.start)
                )
        return target

    def __call__(self, obs: np.ndarray) -> np.ndarray:
        angles = obs[0:3]
        velocities = obs[3:6]
        t = float(obs[11]) * self.config.horizon * self.config.dt
        error = self.target_at(t) - angles
        torque = self.kp * error - self.kd * velocities
        return np.clip(torque, -self.config.torque_limit, self.config.torque_limit)


def _with_wrist_tilt(config: EnvConfig, delta: float) -> tuple[float, float, float]:
    h = config.home_angles
    return (h[0], h[1], h[2] + delta)


def pour_base(config: EnvConfig) -> WaypointController:
    """Unhurried competent pour: ramp the wrist past full-pour tilt."""
    home = config.home_angles
    return WaypointController(
        config,
        [(0.0, home), (0.3, home), (2.5, _with_wrist_tilt(config, -1.15))],
    )


def pour_fast(config: EnvConfig) -> WaypointController:
    """Aggressive pour: slam the wrist over almost immediately."""
    home = config.home_angles
    return WaypointController(
        config,
        [(0.0, home), (0.1, home), (0.7, _with_wrist_tilt(config, -1.3))],
    )


def pour_slow(config: EnvConfig) -> WaypointController:
    """Careful pour: long shallow ramp that trickles the liquid out."""
    home = config.home_angles
    return WaypointController(
        config,
        [(0.0, home), (0.8, home), (5.5, _with_wrist_tilt(config, -1.1))],
    )


def rim_cleaner(config: EnvConfig) -> WaypointController:
    """Pour aimed at the container's rim annulus instead of the opening.

    Swings the shoulder back just enough that the stream straddles the near
    rim, settling into the aim pose before tilting so the landing spot stays
    tight.
    """
    home = config.home_angles
    pre = (home[0] + 0.105, home[1], home[2] - 0.05)
    deep = (home[0] + 0.105, home[1], home[2] - 1.20)
    return WaypointController(config, [(0.0, home), (1.0, pre), (1.3, pre), (5.0, deep)])


def mixing(config: EnvConfig) -> WaypointController:
    """Pour while oscillating the shoulder: stirring motion over the opening.

    The wrist counter-wiggle keeps the cup tilt (and hence the emission
    rate) steady so the stir shows up in the hand path, not the stream.
    """
    home = config.home_angles
    return WaypointController(
        config,
        [(0.0, home), (0.3, home), (2.5, _with_wrist_tilt(config, -1.15))],
        wiggles=(
            Wiggle(joint=0, amplitude=0.08, frequency=1.4, start=0.8),
            Wiggle(joint=2, amplitude=-0.08, frequency=1.4, start=0.8),
        ),
    )


def watering(config: EnvConfig) -> WaypointController:
    """Partial tilt swept across the workspace like watering a flowerbed.

    Shoulder sweep with a wrist counter-sweep: the tilt stays at the partial
    pour angle while the stream's landing point travels side to side.
    """
    home = config.home_angles
    return WaypointController(
        config,
        [
            (0.0, home),
            (0.5, _with_wrist_tilt(config, -0.9)),
            (8.0, _with_wrist_tilt(config, -1.2)),
        ],
        wiggles=(
            Wiggle(joint=0, amplitude=0.75, frequency=0.15, start=0.5),
            Wiggle(joint=2, amplitude=-0.75, frequency=0.15, start=0.5),
        ),
    )


def never_emit(config: EnvConfig) -> WaypointController:
    """Hold the home pose: nothing ever leaves the cup."""
    home = config.home_angles
    return WaypointController(config, [(0.0, home)])


def horizon_pour(config: EnvConfig) -> WaypointController:
    """Start pouring so late the stream is still running at the horizon."""
    home = config.home_angles
    t_end = config.horizon * config.dt
    return WaypointController(
        config,
        [(0.0, home), (t_end - 1.5, home), (t_end, _with_wrist_tilt(config, -0.6))],
    )


def twitcher(config: EnvConfig) -> WaypointController:
    """Brief shallow tip that dribbles a little liquid, then gives up.

    Fails every interesting signature: low fill, little spill, no sweep, no
    oscillation, long done at the horizon.
    """
    home = config.home_angles
    return WaypointController(
        config,
        [
            (0.0, home),
            (1.0, home),
            (1.8, _with_wrist_tilt(config, -0.18)),
            (2.6, home),
        ],
    )


def far_dump(config: EnvConfig) -> WaypointController:
    """Tilt away from the container: everything lands on the floor."""
    home = config.home_angles
    return WaypointController(
        config,
        [(0.0, home), (0.3, home), (2.0, _with_wrist_tilt(config, 1.3))],
    )


ARCHETYPES = {
    "pour_fast": pour_fast,
    "pour_base": pour_base,
    "pour_slow": pour_slow,
    "rim_cleaner": rim_cleaner,
    "mixing": mixing,
    "watering": watering,
    "never_emit": never_emit,
    "twitcher": twitcher,
    "horizon_pour": horizon_pour,
    "far_dump": far_dump,
}
