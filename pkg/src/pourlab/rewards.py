"""Cost-benefit reward and Gaussian weight mutation.

The scalar reward trades off three terms: an accuracy benefit scaled by
``w_a``, an exponential time discount with scale ``w_t`` (seconds), and an
effort cost scaled by ``w_e``:

    reward = exp(-t / w_t) * w_a * A - w_e * E

Skill diversification comes from mutating ``w_t`` and ``w_e`` with zero-mean
Gaussian noise around a baseline; ``w_a`` stays fixed so the agent keeps a
general objective. For systematic sweeps the noise is sampled at five fixed
points per weight (-2, -1, 0, +1, +2 sigma), giving a 25-cell grid.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, NumericError

# Offsets in sigma units; 0 is the unmutated baseline.
DEFAULT_GRID_OFFSETS = (-2.0, -1.0, 0.0, 1.0, 2.0)

# Grid values are rounded to this many decimal places so that sigma-multiples
# of decimal baselines come out decimal-exact (0.2 + 2*0.05 -> 0.3, not
# 0.30000000000000004). The zero-offset cell always carries the baseline
# value verbatim.
_GRID_DECIMALS = 12


@dataclass(frozen=True)
class RewardWeights:
    """The three reward weights. ``w_a`` is never mutated."""

    w_a: float = 1.0
    w_t: float = 4.0
    w_e: float = 0.2

    def validate(self) -> "RewardWeights":
        if not (math.isfinite(self.w_a) and self.w_a > 0):
            raise ConfigError(f"w_a must be finite and > 0 (got {self.w_a})")
        if not (math.isfinite(self.w_t) and self.w_t > 0):
            raise ConfigError(f"w_t must be finite and > 0 (got {self.w_t})")
        if not (math.isfinite(self.w_e) and self.w_e >= 0):
            raise ConfigError(f"w_e must be finite and >= 0 (got {self.w_e})")
        return self


@dataclass(frozen=True)
class MutationSpec:
    """How to perturb the baseline weights."""

    sigma_t: float = 1.0
    sigma_e: float = 0.05
    grid_offsets: tuple[float, ...] = DEFAULT_GRID_OFFSETS

    def validate(self) -> "MutationSpec":
        if not (math.isfinite(self.sigma_t) and self.sigma_t > 0):
            raise ConfigError(f"sigma_t must be finite and > 0 (got {self.sigma_t})")
        if not (math.isfinite(self.sigma_e) and self.sigma_e > 0):
            raise ConfigError(f"sigma_e must be finite and > 0 (got {self.sigma_e})")
        if 0.0 not in self.grid_offsets:
            raise ConfigError(f"grid_offsets must contain 0 (got {self.grid_offsets})")
        if list(self.grid_offsets) != sorted(self.grid_offsets):
            raise ConfigError(f"grid_offsets must be sorted ascending (got {self.grid_offsets})")
        return self


def compute_reward(weights: RewardWeights, accuracy: float, elapsed: float, effort: float) -> float:
    """Evaluate the cost-benefit reward for one (A, t, E) triple.

    Pure double-precision scalar function. Raises NumericError on
    non-finite inputs.
    """
    if not (math.isfinite(accuracy) and math.isfinite(elapsed) and math.isfinite(effort)):
        raise NumericError(
            f"reward inputs must be finite (A={accuracy}, t={elapsed}, E={effort})"
        )
    return math.exp(-elapsed / weights.w_t) * weights.w_a * accuracy - weights.w_e * effort


def per_step_reward(weights: RewardWeights, info, prev=None) -> float:
    """Dense per-step form of the cost-benefit reward.

    The accuracy term is applied as a difference of discounted cumulative
    accuracy between consecutive steps, so that summing over an episode
    telescopes to the terminal expression exp(-T/w_t)*w_a*A(T). The effort
    cost is charged per step. ``info``/``prev`` need ``accuracy``,
    ``elapsed`` and ``effort`` attributes; ``prev=None`` means the episode
    start (zero accuracy).
    """
    now = math.exp(-info.elapsed / weights.w_t) * info.accuracy
    before = 0.0
    if prev is not None:
        before = math.exp(-prev.elapsed / weights.w_t) * prev.accuracy
    return weights.w_a * (now - before) - weights.w_e * info.effort


def mutate_weight(
    base: float,
    sigma: float,
    rng: np.random.Generator,
    lower: float = 0.0,
    inclusive: bool = True,
) -> float:
    """Draw base + eps with eps ~ N(0, sigma^2), resampling invalid values.

    ``lower``/``inclusive`` define the validity region: values below
    ``lower`` (or equal to it when the bound is exclusive) are rejected and
    redrawn, which keeps time weights strictly positive and effort weights
    non-negative.
    """
    if not (math.isfinite(sigma) and sigma > 0):
        raise ConfigError(f"sigma must be finite and > 0 (got {sigma})")
    while True:
        value = base + sigma * rng.standard_normal()
        if value > lower or (inclusive and value == lower):
            return value


def mutate_weights(base: RewardWeights, spec: MutationSpec, rng: np.random.Generator) -> RewardWeights:
    """Random-mode mutation: perturb w_t and w_e, keep w_a fixed."""
    spec.validate()
    w_t = mutate_weight(base.w_t, spec.sigma_t, rng, lower=0.0, inclusive=False)
    w_e = mutate_weight(base.w_e, spec.sigma_e, rng, lower=0.0, inclusive=True)
    return RewardWeights(w_a=base.w_a, w_t=w_t, w_e=w_e).validate()


def _grid_values(base: float, sigma: float, offsets: tuple[float, ...], floor: float) -> list[float]:
    values = []
    for k in offsets:
        if k == 0.0:
            v = base
        else:
            v = round(base + k * sigma, _GRID_DECIMALS)
        values.append(max(floor, v))
    return values


def build_weight_grid(base: RewardWeights, spec: MutationSpec) -> list[RewardWeights]:
    """Cartesian 5x5 (with default offsets) grid of mutated weight pairs.

    Output is row-major with the time weight as the outer axis and the
    effort weight inner, so for default offsets the unmutated baseline sits
    at index 12. Values are clamped to validity: w_t no lower than
    0.1 * base.w_t, w_e no lower than 0.
    """
    base.validate()
    spec.validate()
    t_values = _grid_values(base.w_t, spec.sigma_t, spec.grid_offsets, floor=0.1 * base.w_t)
    e_values = _grid_values(base.w_e, spec.sigma_e, spec.grid_offsets, floor=0.0)
    return [
        RewardWeights(w_a=base.w_a, w_t=wt, w_e=we).validate()
        for wt, we in itertools.product(t_values, e_values)
    ]


def baseline_grid_index(spec: MutationSpec) -> int:
    """Index of the (0, 0)-offset cell in build_weight_grid's output."""
    zero = spec.grid_offsets.index(0.0)
    return zero * len(spec.grid_offsets) + zero
