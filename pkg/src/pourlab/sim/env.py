"""Pouring environment: arm, liquid, container and scale in one step loop.

The functional core (``reset_state`` / ``step_state`` / ``observe`` /
``scale_read``) is deterministic given an explicit RNG; :class:`PourEnv`
wraps it in the usual reset/step interface and owns the generator.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import UsageError
from .arm import ArmState, CupPose, arm_dynamics, clamp_action, cup_pose, home_state
from .config import EnvConfig
from . import particles as pt


@dataclass
class EnvState:
    """Full mutable simulator state; everything needed to continue a rollout."""

    arm: ArmState
    pos: np.ndarray  # (N, 2) particle positions
    vel: np.ndarray  # (N, 2) particle velocities
    phase: np.ndarray  # (N,) int8 phase codes from particles.py
    step_index: int = 0
    emission_accum: float = 0.0
    emitting: bool = False
    last_impact_impulse: float = 0.0
    last_landing_xs: np.ndarray = field(default_factory=lambda: np.empty(0))
    done: bool = False

    def copy(self) -> "EnvState":
        return EnvState(
            arm=self.arm.copy(),
            pos=self.pos.copy(),
            vel=self.vel.copy(),
            phase=self.phase.copy(),
            step_index=self.step_index,
            emission_accum=self.emission_accum,
            emitting=self.emitting,
            last_impact_impulse=self.last_impact_impulse,
            last_landing_xs=self.last_landing_xs.copy(),
            done=self.done,
        )

    def count(self, phase_code: int) -> int:
        return int(np.count_nonzero(self.phase == phase_code))

    @property
    def in_cup_count(self) -> int:
        return self.count(pt.IN_CUP)

    @property
    def in_flight_count(self) -> int:
        return self.count(pt.IN_FLIGHT)

    @property
    def settled_count(self) -> int:
        return self.count(pt.SETTLED)

    @property
    def rim_count(self) -> int:
        return self.count(pt.RIM)

    @property
    def spilled_count(self) -> int:
        """Particles spilled outside the container, rim landings included."""
        return self.count(pt.SPILLED) + self.count(pt.RIM)


@dataclass(frozen=True)
class ScaleReading:
    """Force-scale output under the container."""

    force: float  # N: weight of settled liquid plus impact spikes
    settled_mass: float  # kg currently inside the container


@dataclass(frozen=True)
class StepInfo:
    """Per-step diagnostics consumed by rewards, logging and classification."""

    accuracy: float  # settled fraction of total liquid, in [0, 1]
    effort: float  # torque-squared integrated over this step (dt * sum tau^2)
    elapsed: float  # sim time since reset, seconds
    scale: ScaleReading
    landing_xs: np.ndarray  # x positions of particles that landed this step
    emitting: bool  # cup was above its spill threshold this step
    in_flight: int  # particles still airborne after this step
    done_reason: str = ""  # "", "horizon" or "poured"


def reset_state(config: EnvConfig) -> EnvState:
    """Fresh state: arm at home, all particles in the cup at the lip."""
    arm = home_state(config)
    pose = cup_pose(arm, config)
    n = config.particle_count
    pos = np.tile(pose.lip, (n, 1))
    return EnvState(
        arm=arm,
        pos=pos,
        vel=np.zeros((n, 2)),
        phase=np.full(n, pt.IN_CUP, dtype=np.int8),
    )


def observe(state: EnvState, config: EnvConfig) -> np.ndarray:
    """12-dim observation vector for the policy.

    [3 joint angles, 3 joint velocities, cup lip x, cup lip z, cup tilt,
    remaining fill fraction, settled fraction, normalised time].
    """
    pose = cup_pose(state.arm, config)
    n = config.particle_count
    return np.array(
        [
            *state.arm.joint_angles,
            *state.arm.joint_velocities,
            pose.lip[0],
            pose.lip[1],
            pose.tilt,
            state.in_cup_count / n,
            state.settled_count / n,
            state.step_index / config.horizon,
        ]
    )


def scale_read(state: EnvState, config: EnvConfig) -> ScaleReading:
    """Force scale: settled weight plus this step's impact impulse over dt."""
    settled_mass = state.settled_count * config.particle_mass
    force = config.gravity * settled_mass + state.last_impact_impulse / config.dt
    return ScaleReading(force=force, settled_mass=settled_mass)


def step_state(
    state: EnvState,
    action: np.ndarray,
    config: EnvConfig,
    rng: np.random.Generator,
) -> tuple[EnvState, StepInfo]:
    """Advance one control step. Returns a new state; raises after done."""
    if state.done:
        raise UsageError("step() called on a finished episode; reset() first")
    state = state.copy()
    torques = clamp_action(np.asarray(action, dtype=float), config)
    state.arm = arm_dynamics(state.arm, torques, config)
    pose = cup_pose(state.arm, config)
    pt.emission_update(state, pose, config, rng)
    pt.particle_update(state, config)
    state.step_index += 1

    n = config.particle_count
    settled = state.settled_count
    in_flight = state.in_flight_count
    poured = settled >= config.target_count and in_flight == 0 and not state.emitting
    horizon = state.step_index >= config.horizon
    state.done = poured or horizon
    reason = "poured" if poured else ("horizon" if horizon else "")

    info = StepInfo(
        accuracy=settled / n,
        effort=config.dt * float(np.dot(torques, torques)),
        elapsed=state.step_index * config.dt,
        scale=scale_read(state, config),
        landing_xs=state.last_landing_xs,
        emitting=state.emitting,
        in_flight=in_flight,
        done_reason=reason,
    )
    return state, info


class PourEnv:
    """Stateful wrapper owning the RNG; the usual reset/step loop.

    ``step`` returns (observation, info, done). Reward shaping lives in
    :mod:`pourlab.rewards` so one rollout can be scored under any weights.
    """

    def __init__(self, config: EnvConfig | None = None, seed: int = 0):
        self.config = config if config is not None else EnvConfig()
        self.config.validate()
        self._seed = seed
        self.rng = np.random.default_rng(seed)
        self.state = reset_state(self.config)

    def reset(self, seed: int | None = None) -> np.ndarray:
        """Start a fresh episode; reseeds the RNG only when ``seed`` is given."""
        if seed is not None:
            self._seed = seed
            self.rng = np.random.default_rng(seed)
        self.state = reset_state(self.config)
        return observe(self.state, self.config)

    def step(self, action: np.ndarray) -> tuple[np.ndarray, StepInfo, bool]:
        self.state, info = step_state(self.state, action, self.config, self.rng)
        return observe(self.state, self.config), info, self.state.done

    @property
    def observation_size(self) -> int:
        return 12

    @property
    def action_size(self) -> int:
        return len(self.config.link_lengths)
