"""Trajectory recording: the signals saved for every evaluation rollout.

A :class:`TrajectoryLog` holds one row per control step (plus the initial
sample) with the end-effector pose normalized to the initial pose, the
scale force, applied torques, cumulative mass buckets, the emission flag
and the landing x coordinates. Logs serialize to JSONL, one object per
step, with stable keys (documented in JSONL_KEYS).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from ..errors import FormatError, UsageError
from ..sim import particles as pt
from ..sim.arm import clamp_action, cup_pose
from ..sim.env import PourEnv

# One JSONL object per step, with exactly these keys.
JSONL_KEYS = (
    "t",            # elapsed seconds since reset
    "ee_x",         # end-effector x minus initial x (m)
    "ee_z",         # end-effector z minus initial z (m)
    "ee_angle",     # cup tilt relative to initial pose (rad)
    "force",        # scale reading (N)
    "torques",      # applied joint torques, list of 3 (N*m)
    "settled_mass", # cumulative kg inside the container
    "spilled_mass", # cumulative kg outside (rim excluded)
    "rim_mass",     # cumulative kg on the rim annulus
    "emitting",     # cup above its spill threshold this step
    "landing_xs",   # x coordinates of particles that landed this step
)


@dataclass
class TrajectoryLog:
    """Column-arrays for one episode; first row is the initial state."""

    elapsed: np.ndarray       # (T,)
    ee_x: np.ndarray          # (T,) normalized to initial pose
    ee_z: np.ndarray          # (T,)
    ee_angle: np.ndarray      # (T,)
    force: np.ndarray         # (T,)
    torques: np.ndarray       # (T, 3); zeros on the initial row
    settled_mass: np.ndarray  # (T,)
    spilled_mass: np.ndarray  # (T,)
    rim_mass: np.ndarray      # (T,)
    emitting: np.ndarray      # (T,) bool
    landing_xs: list = field(default_factory=list)  # per-row lists of x

    def __len__(self) -> int:
        return len(self.elapsed)

    @property
    def steps(self) -> int:
        """Control steps taken (rows minus the initial sample)."""
        return len(self.elapsed) - 1


def record(
    elapsed,
    ee_positions,
    ee_angles,
    forces,
    torques,
    settled_mass,
    spilled_mass,
    rim_mass,
    emitting,
    landing_xs,
) -> TrajectoryLog:
    """Build a log from raw per-step traces, normalizing to the initial pose.

    Pure transform: positions and angles get the first sample subtracted, so
    the first row is exactly zero regardless of the absolute start pose.
    """
    ee = np.asarray(ee_positions, dtype=float)
    ang = np.asarray(ee_angles, dtype=float)
    if len(ee) == 0:
        raise UsageError("cannot record an empty trace")
    return TrajectoryLog(
        elapsed=np.asarray(elapsed, dtype=float),
        ee_x=ee[:, 0] - ee[0, 0],
        ee_z=ee[:, 1] - ee[0, 1],
        ee_angle=ang - ang[0],
        force=np.asarray(forces, dtype=float),
        torques=np.asarray(torques, dtype=float),
        settled_mass=np.asarray(settled_mass, dtype=float),
        spilled_mass=np.asarray(spilled_mass, dtype=float),
        rim_mass=np.asarray(rim_mass, dtype=float),
        emitting=np.asarray(emitting, dtype=bool),
        landing_xs=[list(map(float, xs)) for xs in landing_xs],
    )


def rollout_trajectory(env: PourEnv, policy, seed: int | None = None) -> TrajectoryLog:
    """Run ``policy`` (obs -> torques) for one episode and record it."""
    config = env.config
    obs = env.reset(seed=seed)
    mass = config.particle_mass

    def pose_row():
        pose = cup_pose(env.state.arm, config)
        return pose.ee.copy(), pose.tilt

    elapsed = [0.0]
    ee_positions = []
    ee_angles = []
    ee, ang = pose_row()
    ee_positions.append(ee)
    ee_angles.append(ang)
    forces = [0.0]
    torques = [np.zeros(3)]
    settled = [0.0]
    spilled = [0.0]
    rim = [0.0]
    emitting = [False]
    landing_xs: list[list[float]] = [[]]

    done = False
    while not done:
        action = clamp_action(np.asarray(policy(obs), dtype=float), config)
        obs, info, done = env.step(action)
        elapsed.append(info.elapsed)
        ee, ang = pose_row()
        ee_positions.append(ee)
        ee_angles.append(ang)
        forces.append(info.scale.force)
        torques.append(action)
        settled.append(env.state.settled_count * mass)
        spilled.append(env.state.count(pt.SPILLED) * mass)  # rim tracked separately
        rim.append(env.state.rim_count * mass)
        emitting.append(info.emitting)
        landing_xs.append(list(info.landing_xs))

    return record(
        elapsed, ee_positions, ee_angles, forces, torques,
        settled, spilled, rim, emitting, landing_xs,
    )


def write_jsonl(log: TrajectoryLog, path: str) -> None:
    """One JSON object per step with the documented keys."""
    with open(path, "w") as fh:
        for i in range(len(log)):
            row = {
                "t": log.elapsed[i],
                "ee_x": log.ee_x[i],
                "ee_z": log.ee_z[i],
                "ee_angle": log.ee_angle[i],
                "force": log.force[i],
                "torques": log.torques[i].tolist(),
                "settled_mass": log.settled_mass[i],
                "spilled_mass": log.spilled_mass[i],
                "rim_mass": log.rim_mass[i],
                "emitting": bool(log.emitting[i]),
                "landing_xs": log.landing_xs[i],
            }
            fh.write(json.dumps(row) + "\n")


def read_jsonl(path: str) -> TrajectoryLog:
    """Parse a JSONL trajectory; raises FormatError on malformed rows."""
    rows = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FormatError(f"{path}:{lineno}: not valid JSON: {exc}") from exc
            missing = [k for k in JSONL_KEYS if k not in row]
            if missing:
                raise FormatError(f"{path}:{lineno}: missing keys {missing}")
            rows.append(row)
    if not rows:
        raise FormatError(f"{path}: empty trajectory log")
    return TrajectoryLog(
        elapsed=np.array([r["t"] for r in rows], dtype=float),
        ee_x=np.array([r["ee_x"] for r in rows], dtype=float),
        ee_z=np.array([r["ee_z"] for r in rows], dtype=float),
        ee_angle=np.array([r["ee_angle"] for r in rows], dtype=float),
        force=np.array([r["force"] for r in rows], dtype=float),
        torques=np.array([r["torques"] for r in rows], dtype=float),
        settled_mass=np.array([r["settled_mass"] for r in rows], dtype=float),
        spilled_mass=np.array([r["spilled_mass"] for r in rows], dtype=float),
        rim_mass=np.array([r["rim_mass"] for r in rows], dtype=float),
        emitting=np.array([r["emitting"] for r in rows], dtype=bool),
        landing_xs=[list(map(float, r["landing_xs"])) for r in rows],
    )
