"""Generalized Advantage Estimation over flat step arrays."""

from __future__ import annotations

import numpy as np


def compute_gae(
    rewards: np.ndarray,
    values: np.ndarray,
    dones: np.ndarray,
    last_value: float,
    gamma: float,
    lam: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Advantages and value targets for a rollout of T steps.

    ``dones[t]`` marks that the episode ended at step t (no bootstrapping
    across it); ``last_value`` bootstraps the tail if the rollout stopped
    mid-episode. Backward recursion:

        delta_t = r_t + gamma * V_{t+1} * (1 - done_t) - V_t
        A_t     = delta_t + gamma * lam * (1 - done_t) * A_{t+1}

    Returns (advantages, advantages + values).
    """
    t_total = len(rewards)
    advantages = np.zeros(t_total)
    next_adv = 0.0
    next_value = last_value
    for t in range(t_total - 1, -1, -1):
        nonterminal = 1.0 - dones[t]
        delta = rewards[t] + gamma * next_value * nonterminal - values[t]
        next_adv = delta + gamma * lam * nonterminal * next_adv
        advantages[t] = next_adv
        next_value = values[t]
    return advantages, advantages + values
