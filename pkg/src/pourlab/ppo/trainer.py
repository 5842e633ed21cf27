"""On-policy PPO training loop over any (obs, info, done)-protocol env."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Any, Callable

import numpy as np

from ..errors import ConfigError, NumericError
from .adam import Adam, clip_grad_norm
from .buffer import RolloutBuffer
from .gae import compute_gae
from .nets import ActorCritic, loss_and_grad
from .normalizer import RunningNormalizer

RewardFn = Callable[[Any, Any], float]


@dataclass(frozen=True)
class PPOConfig:
    gamma: float = 0.99
    gae_lambda: float = 0.95
    clip: float = 0.2
    learning_rate: float = 3e-4
    epochs: int = 10
    minibatch_size: int = 64
    rollout_steps: int = 2048
    entropy_coef: float = 0.0
    vf_coef: float = 0.5
    total_steps: int = 200_000
    hidden: tuple[int, ...] = (64, 64)
    log_std_init: float = -0.5
    max_grad_norm: float = 0.5
    normalize_advantages: bool = True

    def validate(self) -> "PPOConfig":
        if not 0.0 <= self.gamma <= 1.0:
            raise ConfigError(f"gamma must be in [0, 1] (got {self.gamma})")
        if not 0.0 <= self.gae_lambda <= 1.0:
            raise ConfigError(f"gae_lambda must be in [0, 1] (got {self.gae_lambda})")
        if not self.clip > 0.0:
            raise ConfigError(f"clip must be > 0 (got {self.clip})")
        if not self.learning_rate > 0.0:
            raise ConfigError(f"learning_rate must be > 0 (got {self.learning_rate})")
        if self.epochs < 1:
            raise ConfigError(f"epochs must be >= 1 (got {self.epochs})")
        if self.minibatch_size < 1:
            raise ConfigError(f"minibatch_size must be >= 1 (got {self.minibatch_size})")
        if self.rollout_steps < self.minibatch_size:
            raise ConfigError(
                f"rollout_steps must be >= minibatch_size "
                f"(got {self.rollout_steps} < {self.minibatch_size})"
            )
        if self.total_steps < self.rollout_steps:
            raise ConfigError(
                f"total_steps must be >= rollout_steps "
                f"(got {self.total_steps} < {self.rollout_steps})"
            )
        if not len(self.hidden) >= 1 or any(h < 1 for h in self.hidden):
            raise ConfigError(f"hidden must be non-empty positive sizes (got {self.hidden})")
        if self.entropy_coef < 0 or self.vf_coef < 0 or self.max_grad_norm < 0:
            raise ConfigError("entropy_coef, vf_coef and max_grad_norm must be >= 0")
        return self


@dataclass
class TrainResult:
    ac: ActorCritic
    normalizer: RunningNormalizer
    curve: list[dict]
    config: PPOConfig
    seed: int
    env_steps: int

    @property
    def final_return(self) -> float:
        return self.curve[-1]["mean_episode_return"] if self.curve else float("nan")


def train(
    env,
    reward_fn: RewardFn,
    config: PPOConfig | None = None,
    seed: int = 0,
    log: Callable[[dict], None] | None = None,
) -> TrainResult:
    """Train a fresh actor-critic on ``env`` with PPO.

    ``env`` needs reset(seed)->obs and step(action)->(obs, info, done);
    ``reward_fn(info, prev_info)`` scores each transition (prev_info is None
    at episode starts). Everything is seeded from ``seed``: network init,
    action sampling, minibatch shuffling and the env stream.
    """
    config = (config or PPOConfig()).validate()
    ss = np.random.SeedSequence(seed)
    net_rng, act_rng, shuffle_rng = (np.random.default_rng(s) for s in ss.spawn(3))

    obs_dim = env.observation_size
    act_dim = env.action_size
    ac = ActorCritic(obs_dim, act_dim, config.hidden, config.log_std_init, net_rng)
    adam = Adam(len(ac.params), lr=config.learning_rate)
    norm = RunningNormalizer(obs_dim)
    buffer = RolloutBuffer(config.rollout_steps, obs_dim, act_dim)

    obs_raw = env.reset(seed=seed)
    prev_info = None
    ep_return = 0.0
    ep_len = 0
    curve: list[dict] = []
    env_steps = 0
    iterations = math.ceil(config.total_steps / config.rollout_steps)

    for iteration in range(iterations):
        buffer.reset()
        finished_returns: list[float] = []
        finished_lengths: list[int] = []
        last_done = False
        while not buffer.full:
            norm.update(obs_raw)
            obs = norm.normalize(obs_raw)
            action, logp, value = ac.act(obs, act_rng)
            obs_raw, info, done = env.step(action)
            reward = reward_fn(info, prev_info)
            buffer.add(obs, action, logp, reward, float(done), value)
            env_steps += 1
            ep_return += reward
            ep_len += 1
            if done:
                finished_returns.append(ep_return)
                finished_lengths.append(ep_len)
                ep_return = 0.0
                ep_len = 0
                prev_info = None
                obs_raw = env.reset()
            else:
                prev_info = info
            last_done = done

        if last_done:
            last_value = 0.0
        else:
            last_value = float(ac.values(norm.normalize(obs_raw).reshape(1, -1))[0])
        advantages, value_targets = compute_gae(
            buffer.rewards, buffer.values, buffer.dones, last_value,
            config.gamma, config.gae_lambda,
        )
        if config.normalize_advantages:
            advantages = (advantages - advantages.mean()) / (advantages.std() + 1e-8)

        stats_rows = []
        for _ in range(config.epochs):
            for idx in buffer.minibatches(config.minibatch_size, shuffle_rng):
                loss, grad, stats = loss_and_grad(
                    ac,
                    buffer.obs[idx],
                    buffer.actions[idx],
                    buffer.log_probs[idx],
                    advantages[idx],
                    value_targets[idx],
                    config.clip,
                    config.vf_coef,
                    config.entropy_coef,
                )
                if not (math.isfinite(loss) and np.all(np.isfinite(grad))):
                    raise NumericError(
                        f"non-finite PPO update at iteration {iteration} "
                        f"(loss={loss}); aborting training"
                    )
                clip_grad_norm(grad, config.max_grad_norm)
                adam.step(ac.params, grad)
                stats_rows.append(stats)

        row = {
            "iteration": iteration,
            "env_steps": env_steps,
            "episodes_finished": len(finished_returns),
            "mean_episode_return": (
                float(np.mean(finished_returns)) if finished_returns
                else (curve[-1]["mean_episode_return"] if curve else 0.0)
            ),
            "mean_episode_length": (
                float(np.mean(finished_lengths)) if finished_lengths
                else (curve[-1]["mean_episode_length"] if curve else 0.0)
            ),
            "loss": float(np.mean([s.loss for s in stats_rows])),
            "policy_loss": float(np.mean([s.policy_loss for s in stats_rows])),
            "value_loss": float(np.mean([s.value_loss for s in stats_rows])),
            "entropy": float(np.mean([s.entropy for s in stats_rows])),
            "approx_kl": float(np.mean([s.approx_kl for s in stats_rows])),
            "clip_fraction": float(np.mean([s.clip_fraction for s in stats_rows])),
            "mean_log_std": float(ac.clipped_log_std().mean()),
        }
        curve.append(row)
        if log is not None:
            log(row)

    return TrainResult(
        ac=ac, normalizer=norm, curve=curve, config=config, seed=seed, env_steps=env_steps
    )


def evaluate_policy(
    env,
    ac: ActorCritic,
    normalizer: RunningNormalizer,
    seed: int,
    deterministic: bool = True,
) -> list:
    """Roll one episode with a trained policy; returns the per-step infos."""
    rng = np.random.default_rng(seed)
    obs_raw = env.reset(seed=seed)
    infos = []
    done = False
    while not done:
        obs = normalizer.normalize(obs_raw)
        if deterministic:
            action = ac.policy_mean(obs.reshape(1, -1))[0]
        else:
            action, _, _ = ac.act(obs, rng)
        obs_raw, info, done = env.step(action)
        infos.append(info)
    return infos


def ppo_config_to_dict(config: PPOConfig) -> dict:
    doc = asdict(config)
    doc["hidden"] = list(config.hidden)
    return doc


def ppo_config_from_dict(doc: dict) -> PPOConfig:
    kwargs = dict(doc)
    if "hidden" in kwargs:
        kwargs["hidden"] = tuple(kwargs["hidden"])
    return PPOConfig(**kwargs).validate()
