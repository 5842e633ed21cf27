"""Running observation normalization (Welford/Chan parallel moments)."""

from __future__ import annotations

import numpy as np


class RunningNormalizer:
    """Tracks per-dimension mean/variance and whitens observations.

    Update order is deterministic: one batch update per call, using Chan's
    parallel-moments merge. ``normalize`` clips to +-10 standard deviations
    to keep outliers from swamping early training.
    """

    def __init__(self, dim: int, clip: float = 10.0, eps: float = 1e-8):
        self.dim = dim
        self.clip = clip
        self.eps = eps
        self.mean = np.zeros(dim)
        self.var = np.ones(dim)
        self.count = 0.0

    def update(self, batch: np.ndarray) -> None:
        batch = np.atleast_2d(batch)
        n = batch.shape[0]
        if n == 0:
            return
        b_mean = batch.mean(axis=0)
        b_var = batch.var(axis=0)
        if self.count == 0.0:
            self.mean, self.var, self.count = b_mean, b_var, float(n)
            return
        total = self.count + n
        delta = b_mean - self.mean
        self.mean = self.mean + delta * (n / total)
        m_a = self.var * self.count
        m_b = b_var * n
        self.var = (m_a + m_b + delta**2 * self.count * n / total) / total
        self.count = total

    def normalize(self, obs: np.ndarray) -> np.ndarray:
        if self.count == 0.0:
            return np.clip(obs, -self.clip, self.clip)
        z = (obs - self.mean) / np.sqrt(self.var + self.eps)
        return np.clip(z, -self.clip, self.clip)

    def state_dict(self) -> dict:
        return {
            "mean": self.mean.tolist(),
            "var": self.var.tolist(),
            "count": self.count,
            "clip": self.clip,
        }

    @classmethod
    def from_state_dict(cls, state: dict, dim: int) -> "RunningNormalizer":
        norm = cls(dim, clip=float(state.get("clip", 10.0)))
        norm.mean = np.asarray(state["mean"], dtype=float)
        norm.var = np.asarray(state["var"], dtype=float)
        norm.count = float(state["count"])
        return norm
