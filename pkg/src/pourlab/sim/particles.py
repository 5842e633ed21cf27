"""Particle liquid: threshold emission from the cup and ballistic flight.

Liquid is a fixed population of particles in one of five disjoint buckets:
in the cup, in flight, settled inside the container, landed on the rim
annulus, or spilled outside. Buckets only ever move forward
(cup -> flight -> landed), which makes mass conservation an integer
invariant rather than a floating-point one.
"""

from __future__ import annotations

import math

import numpy as np

from .arm import CupPose, pour_direction
from .config import EnvConfig

# Particle phase codes. RIM is the rim-annulus sub-case of spilled-out kept
# separate so rim-targeted behaviour is detectable by geometry.
IN_CUP = 0
IN_FLIGHT = 1
SETTLED = 2
SPILLED = 3
RIM = 4

PHASE_NAMES = {IN_CUP: "InCup", IN_FLIGHT: "InFlight", SETTLED: "SettledIn", SPILLED: "SpilledOut", RIM: "SpilledOut"}


def spill_threshold(fill_fraction: float, config: EnvConfig) -> float:
    """Tilt angle beyond which a cup at the given fill starts to pour.

    The freeboard left above the liquid is depth*(1 - fill); tilting raises
    the surface at the lip by half_width*tan(tilt), so spilling starts at
    arctan(depth*(1 - fill)/half_width). Decreases monotonically as the cup
    gets fuller.
    """
    free = config.cup.depth * (1.0 - fill_fraction)
    return math.atan2(free, config.cup.half_width)


def emission_rate(tilt: float, in_cup: int, config: EnvConfig) -> float:
    """Particles per second leaving the cup at the given signed tilt."""
    if in_cup <= 0:
        return 0.0
    fill = config.initial_fill * in_cup / config.particle_count
    margin = abs(tilt) - spill_threshold(fill, config)
    if margin <= 0.0:
        return 0.0
    return min(config.emission_rate_max, config.emission_gain * margin)


def emission_update(state, pose: CupPose, config: EnvConfig, rng: np.random.Generator) -> int:
    """Convert in-cup particles to in-flight at the current pour rate.

    Fractional emission accumulates across steps so the realised count
    tracks rate*dt exactly over time. Emitted particles start at the lip
    with the lip velocity plus a small jet along the pour direction (and
    optional Gaussian jitter). Mutates ``state``; returns the number
    emitted this step.
    """
    in_cup_idx = np.nonzero(state.phase == IN_CUP)[0]
    rate = emission_rate(pose.tilt, len(in_cup_idx), config)
    state.emitting = rate > 0.0
    state.emission_accum += rate * config.dt
    count = int(state.emission_accum)
    if count <= 0:
        return 0
    state.emission_accum -= count
    count = min(count, len(in_cup_idx))
    if count == 0:
        return 0
    idx = in_cup_idx[:count]
    vel = pose.lip_velocity + config.jet_speed * pour_direction(pose.tilt)
    state.pos[idx] = pose.lip
    state.vel[idx] = vel
    if config.jet_jitter > 0.0:
        state.vel[idx] += rng.normal(0.0, config.jet_jitter, size=(count, 2))
    state.phase[idx] = IN_FLIGHT
    return count


def particle_update(state, config: EnvConfig) -> None:
    """Integrate in-flight particles and classify landings.

    Flight is ballistic (gravity only, semi-implicit Euler). A particle
    descending through the container's rim height lands: inside the opening
    it settles, within the rim annulus it counts as rim mass, otherwise it
    spills. Particles that never cross the rim plane land on the floor and
    spill (the container cannot be entered from below). Landing x positions
    are interpolated at the crossing, recorded for spread statistics, and
    impacts inside the container accumulate an impulse for the scale spike.
    Mutates ``state``.
    """
    state.last_impact_impulse = 0.0
    flying = np.nonzero(state.phase == IN_FLIGHT)[0]
    if len(flying) == 0:
        state.last_landing_xs = np.empty(0)
        return
    pos_old = state.pos[flying].copy()
    vel = state.vel[flying]
    vel[:, 1] -= config.gravity * config.dt
    pos_new = pos_old + vel * config.dt

    rim_z = config.container.rim_z
    descending = vel[:, 1] < 0.0
    crossed_rim = descending & (pos_old[:, 1] > rim_z) & (pos_new[:, 1] <= rim_z)
    hit_floor = descending & ~crossed_rim & (pos_new[:, 1] <= 0.0)
    landed = crossed_rim | hit_floor

    land_z = np.where(crossed_rim, rim_z, 0.0)
    dz = pos_old[:, 1] - pos_new[:, 1]
    with np.errstate(divide="ignore", invalid="ignore"):
        frac = np.where(dz != 0.0, (pos_old[:, 1] - land_z) / dz, 0.0)
    land_x = pos_old[:, 0] + frac * (pos_new[:, 0] - pos_old[:, 0])

    offset = np.abs(land_x - config.container.center_x)
    inside = crossed_rim & (offset < config.container.half_width)
    on_rim = crossed_rim & ~inside & (
        offset <= config.container.half_width + config.container.rim_half_thickness
    )
    outside = landed & ~inside & ~on_rim

    # Freeze landed particles at the crossing point; keep the rest flying.
    pos_new[landed, 0] = land_x[landed]
    pos_new[landed, 1] = land_z[landed]
    state.pos[flying] = pos_new
    state.vel[flying] = vel
    state.vel[flying[landed]] = 0.0
    state.phase[flying[inside]] = SETTLED
    state.phase[flying[on_rim]] = RIM
    state.phase[flying[outside]] = SPILLED

    state.last_landing_xs = land_x[landed]
    state.last_impact_impulse = float(
        config.particle_mass * np.sum(np.abs(vel[inside, 1]))
    )
