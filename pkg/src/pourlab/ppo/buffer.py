"""Fixed-size rollout storage with shuffled minibatch iteration."""

from __future__ import annotations

import numpy as np


class RolloutBuffer:
    """Preallocated arrays for one on-policy rollout of ``capacity`` steps."""

    def __init__(self, capacity: int, obs_dim: int, act_dim: int):
        self.capacity = capacity
        self.obs = np.zeros((capacity, obs_dim))
        self.actions = np.zeros((capacity, act_dim))
        self.log_probs = np.zeros(capacity)
        self.rewards = np.zeros(capacity)
        self.dones = np.zeros(capacity)
        self.values = np.zeros(capacity)
        self.ptr = 0

    def add(self, obs, action, log_prob, reward, done, value) -> None:
        i = self.ptr
        self.obs[i] = obs
        self.actions[i] = action
        self.log_probs[i] = log_prob
        self.rewards[i] = reward
        self.dones[i] = done
        self.values[i] = value
        self.ptr += 1

    @property
    def full(self) -> bool:
        return self.ptr >= self.capacity

    def reset(self) -> None:
        self.ptr = 0

    def minibatches(self, size: int, rng: np.random.Generator):
        """Yield index arrays covering the buffer in shuffled chunks."""
        order = rng.permutation(self.capacity)
        for start in range(0, self.capacity, size):
            yield order[start : start + size]
