"""Planar 3-link arm: kinematics and torque-driven joint dynamics.

Joints are modelled as decoupled unit-inertia integrators with viscous
damping plus the gravity torque induced by the cup payload; links
themselves are massless. This keeps the action space (joint torques) and
the effort metric of the full-dynamics setup while staying dependency-free
and exactly reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import EnvConfig


@dataclass
class ArmState:
    joint_angles: np.ndarray  # (3,) rad
    joint_velocities: np.ndarray  # (3,) rad/s

    def copy(self) -> "ArmState":
        return ArmState(self.joint_angles.copy(), self.joint_velocities.copy())


@dataclass(frozen=True)
class CupPose:
    """Derived pose of the cup for one arm configuration."""

    ee: np.ndarray  # end-effector position (2,)
    tilt: float  # signed tilt from upright, rad
    lip: np.ndarray  # pouring-lip position (2,)
    lip_velocity: np.ndarray  # (2,) m/s


def home_state(config: EnvConfig) -> ArmState:
    return ArmState(
        joint_angles=np.asarray(config.home_angles, dtype=np.float64).copy(),
        joint_velocities=np.zeros(3, dtype=np.float64),
    )


def joint_positions(angles: np.ndarray, config: EnvConfig) -> np.ndarray:
    """Positions of the three joints and the end-effector, shape (4, 2)."""
    phi = np.cumsum(angles)
    lengths = np.asarray(config.link_lengths)
    pts = np.zeros((4, 2))
    pts[1:, 0] = np.cumsum(lengths * np.cos(phi))
    pts[1:, 1] = np.cumsum(lengths * np.sin(phi))
    return pts


def cup_tilt(angles: np.ndarray, config: EnvConfig) -> float:
    """Signed deviation of the cup axis from upright.

    The cup is upright at the home pose by construction, so the tilt is the
    change in total link orientation since home.
    """
    return float(np.sum(angles) - sum(config.home_angles))


def gravity_torque(angles: np.ndarray, config: EnvConfig) -> np.ndarray:
    """Joint torques needed to hold the cup payload against gravity.

    For a point mass m at the end-effector, raising joint i by dθ lifts the
    payload by (∂z_ee/∂θ_i) dθ, so gravity loads the joint with
    m g ∂z_ee/∂θ_i. Returns zeros for a massless cup.
    """
    if config.cup_mass == 0.0 or config.gravity == 0.0:
        return np.zeros(3)
    phi = np.cumsum(angles)
    lengths = np.asarray(config.link_lengths)
    terms = lengths * np.cos(phi)
    # dz_ee/dtheta_i = sum over links at or beyond joint i
    dz = np.cumsum(terms[::-1])[::-1]
    return config.cup_mass * config.gravity * dz


def clamp_action(torques: np.ndarray, config: EnvConfig) -> np.ndarray:
    return np.clip(np.asarray(torques, dtype=np.float64), -config.torque_limit, config.torque_limit)


def arm_dynamics(arm: ArmState, torques: np.ndarray, config: EnvConfig) -> ArmState:
    """One semi-implicit Euler step of the damped unit-inertia joints.

    omega' = omega + dt (tau - damping*omega - gravity_torque(theta))
    theta' = theta + dt omega'

    Angles are clamped to the joint limits with velocity zeroed at the stop.
    Expects torques already clamped to the torque limit.
    """
    damping = np.asarray(config.joint_damping)
    accel = torques - damping * arm.joint_velocities - gravity_torque(arm.joint_angles, config)
    vel = arm.joint_velocities + config.dt * accel
    ang = arm.joint_angles + config.dt * vel
    lo = np.asarray(config.joint_limits_low)
    hi = np.asarray(config.joint_limits_high)
    clamped = np.clip(ang, lo, hi)
    vel = np.where(ang == clamped, vel, 0.0)
    return ArmState(clamped, vel)


def cup_pose(arm: ArmState, config: EnvConfig) -> CupPose:
    """End-effector, tilt, lip position and lip velocity for one arm state."""
    pts = joint_positions(arm.joint_angles, config)
    ee = pts[3]
    tilt = cup_tilt(arm.joint_angles, config)
    side = 1.0 if tilt >= 0 else -1.0
    # Lip in cup frame: half a cup to the pouring side, lip_offset up the axis.
    local = np.array([side * config.cup.half_width, config.cup.lip_offset])
    c, s = np.cos(tilt), np.sin(tilt)
    rot = np.array([[c, -s], [s, c]])
    lip = ee + rot @ local
    # Rigid-chain velocity: each joint spins everything distal about itself.
    vel = np.zeros(2)
    for i in range(3):
        r = lip - pts[i]
        vel += arm.joint_velocities[i] * np.array([-r[1], r[0]])
    return CupPose(ee=ee, tilt=tilt, lip=lip, lip_velocity=vel)


def pour_direction(tilt: float) -> np.ndarray:
    """Unit direction of liquid leaving the lip for a signed tilt.

    Exits horizontally toward the pouring side at small tilt, steepens with
    tilt, and points straight down once the cup passes horizontal.
    """
    side = 1.0 if tilt >= 0 else -1.0
    below = min(abs(tilt), np.pi / 2.0)
    return np.array([side * np.cos(below), -np.sin(below)])
