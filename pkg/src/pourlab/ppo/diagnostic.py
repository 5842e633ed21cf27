"""Tiny 1-D target-reach task used to validate the PPO stack end to end.

A damped point mass on a line must reach and hold a fixed target position.
The environment speaks the same (obs, info, done) protocol as the pouring
simulator, so the diagnosis exercises the real trainer unchanged while
converging in well under a minute of CPU time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import UsageError


@dataclass(frozen=True)
class DiagStepInfo:
    """Per-step diagnostics; ``reward`` is consumed directly by the trainer."""

    reward: float
    position: float
    velocity: float
    distance: float
    elapsed: float
    success: bool


class DiagnosticEnv:
    """Damped double integrator: x'' = a - damping * x', target at x = 1.

    The episode ends as soon as the mass is within ``success_radius`` of the
    target (or at the horizon), and every step costs the current distance,
    so reaching quickly is optimal.
    """

    dt = 0.05
    horizon = 120
    target = 1.0
    force_limit = 1.0
    damping = 0.1
    success_radius = 0.05

    def __init__(self, seed: int = 0):
        self.rng = np.random.default_rng(seed)
        self.x = 0.0
        self.v = 0.0
        self.steps = 0
        self.done = True

    def _observe(self) -> np.ndarray:
        return np.array([self.x, self.v, self.target - self.x])

    def reset(self, seed: int | None = None) -> np.ndarray:
        if seed is not None:
            self.rng = np.random.default_rng(seed)
        self.x = float(self.rng.uniform(-0.2, 0.2))
        self.v = 0.0
        self.steps = 0
        self.done = False
        return self._observe()

    def step(self, action: np.ndarray) -> tuple[np.ndarray, DiagStepInfo, bool]:
        if self.done:
            raise UsageError("step() called on a finished episode; reset() first")
        a = float(np.clip(np.asarray(action).reshape(-1)[0], -self.force_limit, self.force_limit))
        self.v += self.dt * (a - self.damping * self.v)
        self.x += self.dt * self.v
        self.steps += 1
        distance = abs(self.x - self.target)
        reached = distance <= self.success_radius
        self.done = reached or self.steps >= self.horizon
        info = DiagStepInfo(
            reward=-distance * self.dt,
            position=self.x,
            velocity=self.v,
            distance=distance,
            elapsed=self.steps * self.dt,
            success=reached,
        )
        return self._observe(), info, self.done

    @property
    def observation_size(self) -> int:
        return 3

    @property
    def action_size(self) -> int:
        return 1


def diagnostic_reward(info: DiagStepInfo, prev: DiagStepInfo | None) -> float:
    return info.reward
