"""Actor-critic MLPs on a single flat parameter vector, with exact gradients.

Everything is plain numpy: forward passes cache activations, and
:func:`loss_and_grad` backpropagates the clipped-surrogate PPO objective
analytically. Keeping all parameters (policy net, state-independent
log-stds, value net) in one flat float64 vector makes the optimizer, the
finite-difference gradient checks and artifact serialization trivial.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

LOG_STD_MIN = -5.0
LOG_STD_MAX = 2.0

_LOG_2PI = math.log(2.0 * math.pi)


def orthogonal(shape: tuple[int, int], gain: float, rng: np.random.Generator) -> np.ndarray:
    """Orthogonal weight init (QR of a Gaussian matrix, sign-fixed)."""
    rows, cols = shape
    a = rng.standard_normal((max(rows, cols), min(rows, cols)))
    q, r = np.linalg.qr(a)
    q = q * np.sign(np.diag(r))
    if rows < cols:
        q = q.T
    return gain * q[:rows, :cols]


class MLPViews:
    """Weight/bias views of consecutive layers inside a flat vector."""

    def __init__(self, flat: np.ndarray, offset: int, sizes: list[int]):
        self.sizes = list(sizes)
        self.layers: list[tuple[np.ndarray, np.ndarray]] = []
        for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
            w = flat[offset : offset + fan_out * fan_in].reshape(fan_out, fan_in)
            offset += fan_out * fan_in
            b = flat[offset : offset + fan_out]
            offset += fan_out
            self.layers.append((w, b))
        self.end = offset

    def init(self, rng: np.random.Generator, out_gain: float) -> None:
        for i, (w, b) in enumerate(self.layers):
            gain = out_gain if i == len(self.layers) - 1 else math.sqrt(2.0)
            w[:] = orthogonal(w.shape, gain, rng)
            b[:] = 0.0


def mlp_size(sizes: list[int]) -> int:
    return sum(o * i + o for i, o in zip(sizes[:-1], sizes[1:]))


def mlp_forward(views: MLPViews, x: np.ndarray) -> tuple[np.ndarray, list[np.ndarray]]:
    """Forward pass with tanh hidden layers; returns output and activations."""
    acts = [x]
    h = x
    for w, b in views.layers[:-1]:
        h = np.tanh(h @ w.T + b)
        acts.append(h)
    w, b = views.layers[-1]
    return h @ w.T + b, acts


def mlp_backward(
    views: MLPViews,
    grads: MLPViews,
    acts: list[np.ndarray],
    gout: np.ndarray,
) -> None:
    """Accumulate d(loss)/d(params) into ``grads`` given d(loss)/d(output)."""
    g = gout
    for i in reversed(range(len(views.layers))):
        w, _ = views.layers[i]
        gw, gb = grads.layers[i]
        gw += g.T @ acts[i]
        gb += g.sum(axis=0)
        if i > 0:
            g = (g @ w) * (1.0 - acts[i] ** 2)


@dataclass(frozen=True)
class LossStats:
    """Diagnostics from one minibatch update."""

    loss: float
    policy_loss: float
    value_loss: float
    entropy: float
    approx_kl: float
    clip_fraction: float


class ActorCritic:
    """Gaussian policy and value function sharing one flat parameter vector.

    Layout: policy MLP | per-action log-std | value MLP. The stds are
    state-independent; they (and the clip bounds on them) follow the usual
    continuous-control PPO setup.
    """

    def __init__(
        self,
        obs_dim: int,
        act_dim: int,
        hidden: tuple[int, ...] = (64, 64),
        log_std_init: float = -0.5,
        rng: np.random.Generator | None = None,
    ):
        if rng is None:
            rng = np.random.default_rng(0)
        self.obs_dim = obs_dim
        self.act_dim = act_dim
        self.hidden = tuple(hidden)
        pi_sizes = [obs_dim, *hidden, act_dim]
        vf_sizes = [obs_dim, *hidden, 1]
        total = mlp_size(pi_sizes) + act_dim + mlp_size(vf_sizes)
        self.params = np.zeros(total)
        self.pi = MLPViews(self.params, 0, pi_sizes)
        self.log_std = self.params[self.pi.end : self.pi.end + act_dim]
        self.vf = MLPViews(self.params, self.pi.end + act_dim, vf_sizes)
        self.pi.init(rng, out_gain=0.01)
        self.log_std[:] = log_std_init
        self.vf.init(rng, out_gain=1.0)

    # -- duplicate views bound to an arbitrary flat vector (for gradients) --
    def views_for(self, flat: np.ndarray) -> tuple[MLPViews, np.ndarray, MLPViews]:
        pi = MLPViews(flat, 0, [self.obs_dim, *self.hidden, self.act_dim])
        log_std = flat[pi.end : pi.end + self.act_dim]
        vf = MLPViews(flat, pi.end + self.act_dim, [self.obs_dim, *self.hidden, 1])
        return pi, log_std, vf

    def clipped_log_std(self) -> np.ndarray:
        return np.clip(self.log_std, LOG_STD_MIN, LOG_STD_MAX)

    def policy_mean(self, obs: np.ndarray) -> np.ndarray:
        out, _ = mlp_forward(self.pi, np.atleast_2d(obs))
        return out

    def values(self, obs: np.ndarray) -> np.ndarray:
        out, _ = mlp_forward(self.vf, np.atleast_2d(obs))
        return out[:, 0]

    def act(self, obs: np.ndarray, rng: np.random.Generator) -> tuple[np.ndarray, float, float]:
        """Sample an action for one observation; returns (action, logp, value)."""
        obs2 = obs.reshape(1, -1)
        mean = self.policy_mean(obs2)[0]
        log_std = self.clipped_log_std()
        std = np.exp(log_std)
        action = mean + std * rng.standard_normal(self.act_dim)
        z = (action - mean) / std
        logp = -0.5 * float(z @ z) - float(log_std.sum()) - 0.5 * self.act_dim * _LOG_2PI
        value = float(self.values(obs2)[0])
        return action, logp, value

    def log_prob(self, obs: np.ndarray, actions: np.ndarray) -> np.ndarray:
        mean = self.policy_mean(obs)
        log_std = self.clipped_log_std()
        z = (actions - mean) / np.exp(log_std)
        return -0.5 * np.sum(z * z, axis=1) - log_std.sum() - 0.5 * self.act_dim * _LOG_2PI

    def entropy(self) -> float:
        """Differential entropy of the (state-independent) action Gaussian."""
        return float(np.sum(self.clipped_log_std() + 0.5 * (_LOG_2PI + 1.0)))


def loss_and_grad(
    ac: ActorCritic,
    obs: np.ndarray,
    actions: np.ndarray,
    logp_old: np.ndarray,
    advantages: np.ndarray,
    value_targets: np.ndarray,
    clip: float,
    vf_coef: float,
    ent_coef: float,
) -> tuple[float, np.ndarray, LossStats]:
    """PPO minibatch loss and its exact gradient w.r.t. ``ac.params``.

    loss = -mean(min(r A, clip(r, 1-eps, 1+eps) A))
           + vf_coef * mean((V - target)^2) - ent_coef * H

    The returned gradient vector matches the parameter layout of ``ac``.
    """
    batch = obs.shape[0]
    mean, pi_acts = mlp_forward(ac.pi, obs)
    values, vf_acts = mlp_forward(ac.vf, obs)
    values = values[:, 0]

    log_std = ac.clipped_log_std()
    std = np.exp(log_std)
    z = (actions - mean) / std
    logp = -0.5 * np.sum(z * z, axis=1) - log_std.sum() - 0.5 * ac.act_dim * _LOG_2PI

    ratio = np.exp(logp - logp_old)
    unclipped = ratio * advantages
    clipped = np.clip(ratio, 1.0 - clip, 1.0 + clip) * advantages
    policy_loss = -float(np.mean(np.minimum(unclipped, clipped)))
    value_err = values - value_targets
    value_loss = float(np.mean(value_err**2))
    entropy = ac.entropy()
    loss = policy_loss + vf_coef * value_loss - ent_coef * entropy

    grad = np.zeros_like(ac.params)
    gpi, glog_std, gvf = ac.views_for(grad)

    # Policy gradient flows through the ratio only where the unclipped
    # branch is active (the min's subgradient).
    active = unclipped <= clipped
    dlogp = -(advantages * ratio * active) / batch  # d(loss)/d(logp), (B,)
    gmean = dlogp[:, None] * (z / std)  # d(logp)/d(mean) = z / std
    mlp_backward(ac.pi, gpi, pi_acts, gmean)

    # d(logp)/d(log_std_j) = z_j^2 - 1; entropy adds dH/d(log_std_j) = 1.
    g_ls = (dlogp[:, None] * (z * z - 1.0)).sum(axis=0) - ent_coef
    # No gradient where the log-std clip is saturated.
    saturated = (ac.log_std < LOG_STD_MIN) | (ac.log_std > LOG_STD_MAX)
    g_ls[saturated] = 0.0
    glog_std += g_ls

    gvalues = (vf_coef * 2.0 * value_err / batch)[:, None]
    mlp_backward(ac.vf, gvf, vf_acts, gvalues)

    with np.errstate(over="ignore"):
        approx_kl = float(np.mean(logp_old - logp))
    clip_fraction = float(np.mean(np.abs(ratio - 1.0) > clip))
    stats = LossStats(
        loss=loss,
        policy_loss=policy_loss,
        value_loss=value_loss,
        entropy=entropy,
        approx_kl=approx_kl,
        clip_fraction=clip_fraction,
    )
    return loss, grad, stats
