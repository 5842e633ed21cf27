"""Tests for the cost-benefit reward and weight mutation."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pourlab.errors import ConfigError, NumericError
from pourlab.rewards import (
    DEFAULT_GRID_OFFSETS,
    MutationSpec,
    RewardWeights,
    baseline_grid_index,
    build_weight_grid,
    compute_reward,
    mutate_weight,
    mutate_weights,
    per_step_reward,
)


class Info:
    def __init__(self, accuracy, elapsed, effort):
        self.accuracy = accuracy
        self.elapsed = elapsed
        self.effort = effort


# --------------------------------------------------------------------------
# compute_reward
# --------------------------------------------------------------------------


def test_reward_zero_accuracy_zero_effort_is_zero():
    w = RewardWeights(3.0, 2.0, 0.7)
    assert compute_reward(w, accuracy=0.0, elapsed=5.0, effort=0.0) == 0.0


def test_reward_perfect_accuracy_at_time_zero_is_w_a():
    w = RewardWeights(1.0, 13.0, 1.0)
    assert compute_reward(w, accuracy=1.0, elapsed=0.0, effort=0.0) == 1.0


def test_reward_hand_value():
    # exp(-2/4) * 2 * 0.5 - 1 * 0.1, frozen from an independent evaluation
    w = RewardWeights(w_a=2.0, w_t=4.0, w_e=1.0)
    r = compute_reward(w, accuracy=0.5, elapsed=2.0, effort=0.1)
    assert r == pytest.approx(0.5065306597126334, rel=1e-15)


def test_reward_rejects_non_finite():
    w = RewardWeights()
    with pytest.raises(NumericError):
        compute_reward(w, accuracy=float("nan"), elapsed=0.0, effort=0.0)
    with pytest.raises(NumericError):
        compute_reward(w, accuracy=1.0, elapsed=float("inf"), effort=0.0)


@given(
    a1=st.floats(0.0, 1.0),
    a2=st.floats(0.0, 1.0),
    t=st.floats(0.0, 100.0),
    e=st.floats(0.0, 10.0),
)
def test_reward_strictly_increasing_in_accuracy(a1, a2, t, e):
    w = RewardWeights(1.0, 4.0, 0.2)
    lo, hi = sorted((a1, a2))
    r_lo = compute_reward(w, lo, t, e)
    r_hi = compute_reward(w, hi, t, e)
    if hi == lo:
        assert r_hi == r_lo
    else:
        # Rounding is monotone, so >= always holds; strict > only once the
        # discounted accuracy gain is resolvable at the result's float scale
        # (a subnormal gain under a deep discount rounds away entirely).
        assert r_hi >= r_lo
        if math.exp(-t / w.w_t) * (hi - lo) > 1e-9 * max(1.0, abs(r_lo)):
            assert r_hi > r_lo


@given(
    t1=st.floats(0.0, 50.0),
    t2=st.floats(0.0, 50.0),
    a=st.floats(0.001, 1.0),
)
def test_reward_strictly_decreasing_in_time_for_positive_accuracy(t1, t2, a):
    w = RewardWeights(1.0, 4.0, 0.0)
    lo, hi = sorted((t1, t2))
    if hi - lo > 1e-9:  # resolvable discount change in doubles
        assert compute_reward(w, a, hi, 0.0) < compute_reward(w, a, lo, 0.0)


@given(
    e1=st.floats(0.0, 1e3),
    e2=st.floats(0.0, 1e3),
)
def test_reward_strictly_decreasing_in_effort(e1, e2):
    w = RewardWeights(1.0, 4.0, 0.5)
    lo, hi = sorted((e1, e2))
    if hi - lo > 1e-9:  # resolvable against the accuracy term in doubles
        assert compute_reward(w, 0.5, 1.0, hi) < compute_reward(w, 0.5, 1.0, lo)


@given(t=st.floats(0.0, 100.0))
def test_discount_bounds(t):
    w = RewardWeights(1.0, 4.0, 0.0)
    d = compute_reward(w, 1.0, t, 0.0)
    assert 0.0 < d <= 1.0
    if t == 0.0:
        assert d == 1.0
    elif t > 1e-12:  # below this exp(-t/w_t) rounds to 1.0 in doubles
        assert d < 1.0


# --------------------------------------------------------------------------
# per_step_reward
# --------------------------------------------------------------------------


def test_per_step_effort_only_when_accuracy_frozen():
    w = RewardWeights(1.0, 4.0, 0.3)
    prev = Info(accuracy=0.5, elapsed=1.0, effort=0.0)
    # Same discounted-accuracy product at both steps isolates the effort term.
    now = Info(accuracy=0.5 * math.exp(-1.0 / 4.0) / math.exp(-1.1 / 4.0), elapsed=1.1, effort=2.0)
    r = per_step_reward(w, now, prev)
    assert r == pytest.approx(-0.3 * 2.0, abs=1e-12)


def test_per_step_decay_penalty_when_holding():
    # Accuracy frozen, zero effort: only the shrinking discount acts, so the
    # per-step contribution is negative.
    w = RewardWeights(1.0, 4.0, 0.0)
    prev = Info(accuracy=0.6, elapsed=2.0, effort=0.0)
    now = Info(accuracy=0.6, elapsed=2.5, effort=0.0)
    assert per_step_reward(w, now, prev) < 0.0


def test_per_step_telescopes_to_terminal_form():
    # Three-step hand trace with zero effort.
    w = RewardWeights(1.5, 2.0, 0.3)
    trace = [Info(0.2, 0.1, 0.0), Info(0.5, 0.2, 0.0), Info(0.9, 0.3, 0.0)]
    total = per_step_reward(w, trace[0], None)
    for prev, now in zip(trace, trace[1:]):
        total += per_step_reward(w, now, prev)
    terminal = compute_reward(w, accuracy=0.9, elapsed=0.3, effort=0.0)
    assert total == pytest.approx(terminal, rel=1e-12)


@settings(max_examples=50)
@given(
    accs=st.lists(st.floats(0.0, 1.0), min_size=1, max_size=30),
    w_t=st.floats(0.5, 20.0),
)
def test_telescoping_property_zero_effort(accs, w_t):
    w = RewardWeights(1.0, w_t, 0.0)
    accs = sorted(accs)  # cumulative accuracy never decreases
    dt = 0.05
    total = 0.0
    prev = None
    for k, a in enumerate(accs):
        now = Info(a, (k + 1) * dt, 0.0)
        total += per_step_reward(w, now, prev)
        prev = now
    terminal = compute_reward(w, accs[-1], len(accs) * dt, 0.0)
    assert total == pytest.approx(terminal, rel=1e-9, abs=1e-12)


# --------------------------------------------------------------------------
# mutate_weight
# --------------------------------------------------------------------------


def test_mutate_weight_rejects_bad_sigma():
    rng = np.random.default_rng(0)
    with pytest.raises(ConfigError):
        mutate_weight(4.0, 0.0, rng)
    with pytest.raises(ConfigError):
        mutate_weight(4.0, -1.0, rng)


def test_mutate_weight_degenerate_sigma_recovers_base():
    rng = np.random.default_rng(1)
    assert mutate_weight(4.0, 1e-300, rng) == 4.0


def test_mutate_weight_deterministic_per_seed():
    a = mutate_weight(4.0, 1.0, np.random.default_rng(99))
    b = mutate_weight(4.0, 1.0, np.random.default_rng(99))
    assert a == b


def test_mutate_weight_statistics():
    # 10k draws: sample mean within the 3-sigma band around the base (plus a
    # truncation-bias allowance; rejection at 0 sits 4 sigma below the base,
    # biasing the mean by sigma*phi(4)/Phi(4) < 2e-4), variance within 5%.
    n = 10_000
    base, sigma = 4.0, 1.0
    rng = np.random.default_rng(7)
    samples = np.array([mutate_weight(base, sigma, rng, inclusive=False) for _ in range(n)])
    bias_bound = 2e-4
    band = 3.0 * sigma / math.sqrt(n) + bias_bound
    assert abs(samples.mean() - base) < band
    assert abs(samples.var(ddof=1) - sigma**2) < 0.05 * sigma**2
    assert (samples > 0).all()


def test_mutate_weight_respects_lower_bound():
    # Base so close to the bound that rejections are the common case.
    rng = np.random.default_rng(3)
    vals = [mutate_weight(0.05, 1.0, rng, lower=0.0, inclusive=False) for _ in range(500)]
    assert all(v > 0 for v in vals)


def test_mutate_weights_keeps_accuracy_weight():
    base = RewardWeights(1.0, 4.0, 0.2)
    out = mutate_weights(base, MutationSpec(), np.random.default_rng(5))
    assert out.w_a == base.w_a
    assert out.w_t > 0
    assert out.w_e >= 0


# --------------------------------------------------------------------------
# build_weight_grid
# --------------------------------------------------------------------------


def test_grid_default_values_exact():
    base = RewardWeights(w_a=1.0, w_t=4.0, w_e=0.2)
    spec = MutationSpec(sigma_t=1.0, sigma_e=0.05)
    grid = build_weight_grid(base, spec)
    assert len(grid) == 25
    assert sorted(set(w.w_t for w in grid)) == [2.0, 3.0, 4.0, 5.0, 6.0]
    assert sorted(set(w.w_e for w in grid)) == [0.1, 0.15, 0.2, 0.25, 0.3]
    assert all(w.w_a == 1.0 for w in grid)
    # Row-major: time outer, effort inner.
    assert grid[0] == RewardWeights(1.0, 2.0, 0.1)
    assert grid[1] == RewardWeights(1.0, 2.0, 0.15)
    assert grid[5] == RewardWeights(1.0, 3.0, 0.1)


def test_grid_baseline_at_center():
    base = RewardWeights(1.0, 4.0, 0.2)
    grid = build_weight_grid(base, MutationSpec())
    idx = baseline_grid_index(MutationSpec())
    assert idx == 12
    assert grid[idx] == base
    assert sum(1 for w in grid if w == base) == 1


def test_grid_clamps_to_validity():
    base = RewardWeights(1.0, 1.0, 0.01)
    spec = MutationSpec(sigma_t=2.0, sigma_e=0.05)
    grid = build_weight_grid(base, spec)
    assert all(w.w_t >= 0.1 * base.w_t for w in grid)
    assert all(w.w_e >= 0.0 for w in grid)


def test_grid_pure_and_duplicate_free():
    base = RewardWeights(1.0, 4.0, 0.2)
    spec = MutationSpec()
    g1 = build_weight_grid(base, spec)
    g2 = build_weight_grid(base, spec)
    assert g1 == g2
    assert len(set(g1)) == 25


@given(
    w_t=st.floats(0.5, 50.0),
    w_e=st.floats(0.0, 5.0),
    sigma_t=st.floats(0.01, 10.0),
    sigma_e=st.floats(0.001, 1.0),
)
def test_grid_soundness_property(w_t, w_e, sigma_t, sigma_e):
    base = RewardWeights(1.0, w_t, w_e)
    grid = build_weight_grid(base, MutationSpec(sigma_t=sigma_t, sigma_e=sigma_e))
    assert len(grid) == 25
    assert base in grid
    for w in grid:
        assert w.w_t > 0
        assert w.w_e >= 0
        assert w.w_a == 1.0


def test_mutation_spec_validation():
    with pytest.raises(ConfigError):
        MutationSpec(sigma_t=0.0).validate()
    with pytest.raises(ConfigError):
        MutationSpec(grid_offsets=(-1.0, 1.0)).validate()
    with pytest.raises(ConfigError):
        MutationSpec(grid_offsets=(1.0, 0.0, -1.0)).validate()
