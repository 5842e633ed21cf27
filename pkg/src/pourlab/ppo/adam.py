"""Adam optimizer with bias correction, operating on flat parameter vectors."""

from __future__ import annotations

import numpy as np


class Adam:
    """Kingma & Ba Adam; updates parameters in place.

    m_t = b1 m + (1-b1) g        v_t = b2 v + (1-b2) g^2
    step = lr * (m_t / (1-b1^t)) / (sqrt(v_t / (1-b2^t)) + eps)
    """

    def __init__(
        self,
        size: int,
        lr: float = 3e-4,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
    ):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.m = np.zeros(size)
        self.v = np.zeros(size)
        self.t = 0

    def step(self, params: np.ndarray, grad: np.ndarray) -> None:
        self.t += 1
        self.m = self.beta1 * self.m + (1.0 - self.beta1) * grad
        self.v = self.beta2 * self.v + (1.0 - self.beta2) * grad * grad
        m_hat = self.m / (1.0 - self.beta1**self.t)
        v_hat = self.v / (1.0 - self.beta2**self.t)
        params -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


def clip_grad_norm(grad: np.ndarray, max_norm: float) -> float:
    """Scale ``grad`` in place to global norm <= max_norm; returns the norm."""
    norm = float(np.linalg.norm(grad))
    if max_norm > 0.0 and norm > max_norm:
        grad *= max_norm / norm
    return norm
