"""Sweep configuration: one INI file drives the whole experiment.

The file uses plain ``key = value`` pairs under five sections (``[env]``,
``[ppo]``, ``[reward]``, ``[mutation]``, ``[classifier]``, ``[sweep]``);
``#``/``;`` comments are allowed, unknown keys are rejected so typos fail
loudly. Tuples are comma-separated. Defaults are the desk-scale profile;
``--ci`` shrinks the training budget to seconds per policy for tests.
"""

from __future__ import annotations

import configparser
import dataclasses
import io
from dataclasses import dataclass

from ..behavior.classify import ClassifierThresholds
from ..errors import ConfigError
from ..ppo.trainer import PPOConfig
from ..rewards import MutationSpec, RewardWeights
from ..sim.config import ContainerGeometry, CupGeometry, EnvConfig

# Desk-scale PPO profile: the PPOConfig class defaults are the library's
# neutral settings; the experiment overrides below are what the pouring
# task needs to train reliably (entropy keeps exploration alive through
# the long effort-dominated warm-up, large rollouts stabilize the
# advantage signal once pouring starts).
DESK_PPO = PPOConfig(
    total_steps=1_500_000,
    entropy_coef=0.02,
    rollout_steps=4096,
    minibatch_size=128,
    gamma=0.995,
)


@dataclass(frozen=True)
class SweepConfig:
    """Everything a sweep needs, in one immutable bundle."""

    env: EnvConfig = EnvConfig()
    ppo: PPOConfig = DESK_PPO
    reward: RewardWeights = RewardWeights()
    mutation: MutationSpec = MutationSpec()
    classifier: ClassifierThresholds = ClassifierThresholds()
    seeds_per_config: int = 3
    evals_per_policy: int = 10
    workers: int = 1
    out_dir: str = "runs/sweep"
    eval_seed_base: int = 10_000

    def validate(self) -> "SweepConfig":
        self.env.validate()
        self.ppo.validate()
        self.reward.validate()
        self.mutation.validate()
        self.classifier.validate()
        if self.seeds_per_config < 1:
            raise ConfigError(
                f"seeds_per_config must be >= 1 (got {self.seeds_per_config})"
            )
        if self.evals_per_policy < 1:
            raise ConfigError(
                f"evals_per_policy must be >= 1 (got {self.evals_per_policy})"
            )
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1 (got {self.workers})")
        if not self.out_dir:
            raise ConfigError("out_dir must be a non-empty path")
        if self.eval_seed_base < 0:
            raise ConfigError(
                f"eval_seed_base must be >= 0 (got {self.eval_seed_base})"
            )
        return self


def apply_ci_profile(config: SweepConfig) -> SweepConfig:
    """Shrink the budget so a full sweep runs in minutes, not hours.

    Only budget knobs change; physics, reward, and classifier stay as
    configured so CI exercises the same code paths.
    """
    ci_ppo = dataclasses.replace(
        config.ppo,
        total_steps=4096,
        rollout_steps=1024,
        minibatch_size=64,
        epochs=4,
    )
    return dataclasses.replace(
        config,
        ppo=ci_ppo,
        seeds_per_config=1,
        evals_per_policy=2,
    )


# ---------------------------------------------------------------------------
# INI <-> dataclass plumbing. Each section maps flat keys onto one dataclass;
# cup/container geometry is flattened with a prefix.

_TUPLE_FLOAT_KEYS = {
    "link_lengths", "home_angles", "joint_limits_low", "joint_limits_high",
    "joint_damping", "grid_offsets",
}
_TUPLE_INT_KEYS = {"hidden"}
_BOOL_KEYS = {"normalize_advantages"}
_INT_KEYS = {
    "horizon", "particle_count", "epochs", "minibatch_size", "rollout_steps",
    "total_steps", "mixing_oscillations_min", "seeds_per_config",
    "evals_per_policy", "workers", "eval_seed_base",
}
_STR_KEYS = {"out_dir"}


def _parse_value(key: str, raw: str):
    raw = raw.strip()
    try:
        if key in _STR_KEYS:
            return raw
        if key in _BOOL_KEYS:
            lowered = raw.lower()
            if lowered in ("true", "yes", "1", "on"):
                return True
            if lowered in ("false", "no", "0", "off"):
                return False
            raise ValueError(f"not a boolean: {raw!r}")
        if key in _TUPLE_FLOAT_KEYS:
            return tuple(float(part) for part in raw.split(","))
        if key in _TUPLE_INT_KEYS:
            return tuple(int(part) for part in raw.split(","))
        if key in _INT_KEYS:
            return int(raw)
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"cannot parse {key} = {raw!r}: {exc}") from exc


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, tuple):
        return ", ".join(repr(v) for v in value)
    if isinstance(value, (int, float)):
        return repr(value)
    return str(value)


def _env_to_flat(env: EnvConfig) -> dict:
    flat = {}
    for f in dataclasses.fields(EnvConfig):
        value = getattr(env, f.name)
        if f.name == "cup":
            for g in dataclasses.fields(CupGeometry):
                flat[f"cup_{g.name}"] = getattr(value, g.name)
        elif f.name == "container":
            for g in dataclasses.fields(ContainerGeometry):
                flat[f"container_{g.name}"] = getattr(value, g.name)
        else:
            flat[f.name] = value
    return flat


def _env_from_flat(flat: dict) -> EnvConfig:
    cup_kw, container_kw, env_kw = {}, {}, {}
    cup_fields = {f.name for f in dataclasses.fields(CupGeometry)}
    container_fields = {f.name for f in dataclasses.fields(ContainerGeometry)}
    for key, value in flat.items():
        if key.startswith("cup_") and key[4:] in cup_fields:
            cup_kw[key[4:]] = value
        elif key.startswith("container_") and key[10:] in container_fields:
            container_kw[key[10:]] = value
        else:
            env_kw[key] = value
    defaults = EnvConfig()
    return dataclasses.replace(
        defaults,
        cup=dataclasses.replace(defaults.cup, **cup_kw),
        container=dataclasses.replace(defaults.container, **container_kw),
        **env_kw,
    )


def _known_keys(section: str) -> set:
    if section == "env":
        return set(_env_to_flat(EnvConfig()))
    if section == "ppo":
        return {f.name for f in dataclasses.fields(PPOConfig)}
    if section == "reward":
        return {f.name for f in dataclasses.fields(RewardWeights)}
    if section == "mutation":
        return {f.name for f in dataclasses.fields(MutationSpec)}
    if section == "classifier":
        return {f.name for f in dataclasses.fields(ClassifierThresholds)}
    if section == "sweep":
        return {
            "seeds_per_config", "evals_per_policy", "workers", "out_dir",
            "eval_seed_base",
        }
    raise ConfigError(f"unknown config section [{section}]")


_SECTIONS = ("env", "ppo", "reward", "mutation", "classifier", "sweep")


def load_sweep_config(path: str) -> SweepConfig:
    """Parse an INI file; missing keys keep defaults, unknown keys fail."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    read = parser.read(path)
    if not read:
        raise ConfigError(f"config file not found: {path}")

    for section in parser.sections():
        if section not in _SECTIONS:
            raise ConfigError(
                f"unknown section [{section}] in {path} (valid: {_SECTIONS})"
            )

    parsed: dict[str, dict] = {}
    for section in _SECTIONS:
        known = _known_keys(section)
        values = {}
        if parser.has_section(section):
            for key, raw in parser.items(section):
                if key not in known:
                    raise ConfigError(
                        f"unknown key {key!r} in [{section}] of {path} "
                        f"(valid: {sorted(known)})"
                    )
                values[key] = _parse_value(key, raw)
        parsed[section] = values

    defaults = SweepConfig()
    env = _env_from_flat({**_env_to_flat(defaults.env), **parsed["env"]})
    ppo = dataclasses.replace(defaults.ppo, **parsed["ppo"])
    reward = dataclasses.replace(defaults.reward, **parsed["reward"])
    mutation = dataclasses.replace(defaults.mutation, **parsed["mutation"])
    classifier = dataclasses.replace(defaults.classifier, **parsed["classifier"])
    sweep_kw = parsed["sweep"]
    return SweepConfig(
        env=env, ppo=ppo, reward=reward, mutation=mutation,
        classifier=classifier, **sweep_kw,
    ).validate()


def render_sweep_config(config: SweepConfig) -> str:
    """Canonical INI rendering (also what the manifest's config hash covers)."""
    parser = configparser.ConfigParser()
    parser["env"] = {k: _format_value(v) for k, v in _env_to_flat(config.env).items()}
    parser["ppo"] = {
        f.name: _format_value(getattr(config.ppo, f.name))
        for f in dataclasses.fields(PPOConfig)
    }
    parser["reward"] = {
        f.name: _format_value(getattr(config.reward, f.name))
        for f in dataclasses.fields(RewardWeights)
    }
    parser["mutation"] = {
        f.name: _format_value(getattr(config.mutation, f.name))
        for f in dataclasses.fields(MutationSpec)
    }
    parser["classifier"] = {
        f.name: _format_value(getattr(config.classifier, f.name))
        for f in dataclasses.fields(ClassifierThresholds)
    }
    parser["sweep"] = {
        "seeds_per_config": str(config.seeds_per_config),
        "evals_per_policy": str(config.evals_per_policy),
        "workers": str(config.workers),
        "out_dir": config.out_dir,
        "eval_seed_base": str(config.eval_seed_base),
    }
    buffer = io.StringIO()
    buffer.write("# pourlab sweep configuration (key = value; # comments allowed)\n")
    parser.write(buffer)
    return buffer.getvalue()


def write_sweep_config(config: SweepConfig, path: str) -> None:
    """Emit the full configuration as a commented INI file."""
    with open(path, "w") as fh:
        fh.write(render_sweep_config(config))
