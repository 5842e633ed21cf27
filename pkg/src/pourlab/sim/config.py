"""Environment configuration for the planar pouring simulator.

Geometry lives in the x-z plane with +z up and the arm base at the origin.
The container stands to the arm's right with its opening at ``rim_z``; the
cup is rigidly attached to the last link and starts upright at the home
pose. All defaults are desk-scale choices sized so a competent pour takes a
few seconds of simulated time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from ..errors import ConfigError


@dataclass(frozen=True)
class CupGeometry:
    """Cup rigidly attached at the end-effector.

    ``lip_offset`` is the distance from the end-effector to the mouth plane
    along the cup axis; ``half_width`` and ``depth`` set the spill-threshold
    geometry (a fuller or wider cup spills at a smaller tilt).
    """

    lip_offset: float = 0.05
    half_width: float = 0.05
    depth: float = 0.08


@dataclass(frozen=True)
class ContainerGeometry:
    """Open-topped target container standing on the scale."""

    center_x: float = 0.40
    half_width: float = 0.06
    rim_half_thickness: float = 0.012
    rim_z: float = 0.30


@dataclass(frozen=True)
class EnvConfig:
    dt: float = 0.01
    horizon: int = 1000
    gravity: float = 9.81
    particle_count: int = 200
    particle_mass: float = 0.001
    cup: CupGeometry = field(default_factory=CupGeometry)
    container: ContainerGeometry = field(default_factory=ContainerGeometry)
    target_fill_fraction: float = 0.8
    torque_limit: float = 5.0
    link_lengths: tuple[float, float, float] = (0.30, 0.25, 0.20)
    joint_damping: tuple[float, float, float] = (0.8, 0.8, 0.8)
    emission_rate_max: float = 200.0

    # Home pose and joint travel. The cup is defined to be upright at the
    # home pose; tilt is measured relative to it.
    home_angles: tuple[float, float, float] = (1.35, -0.55, -0.62)
    joint_limits_low: tuple[float, float, float] = (0.2, -2.6, -2.6)
    joint_limits_high: tuple[float, float, float] = (2.9, 2.6, 2.6)

    # Payload felt by the joints. Liquid particles are accounting tokens and
    # do not load the arm; a non-zero cup mass adds a configuration-dependent
    # gravity torque.
    cup_mass: float = 0.0

    # Liquid column: fraction of cup volume occupied at reset, emission gain
    # in particles/s per radian of tilt beyond the spill threshold, and the
    # small jet that carries emitted particles over the lip.
    initial_fill: float = 0.95
    emission_gain: float = 300.0
    jet_speed: float = 0.08
    jet_jitter: float = 0.02

    @property
    def total_mass(self) -> float:
        return self.particle_count * self.particle_mass

    @property
    def target_count(self) -> int:
        """Settled-particle count that meets the fill target."""
        return math.ceil(self.target_fill_fraction * self.particle_count - 1e-9)

    def validate(self) -> "EnvConfig":
        if not self.dt > 0:
            raise ConfigError(f"dt must be > 0 (got {self.dt})")
        if self.horizon < 1:
            raise ConfigError(f"horizon must be >= 1 (got {self.horizon})")
        if self.particle_count < 1:
            raise ConfigError(f"particle_count must be >= 1 (got {self.particle_count})")
        if not self.particle_mass > 0:
            raise ConfigError(f"particle_mass must be > 0 (got {self.particle_mass})")
        if not 0 < self.target_fill_fraction <= 1:
            raise ConfigError(
                f"target_fill_fraction must be in (0, 1] (got {self.target_fill_fraction})"
            )
        if not self.torque_limit > 0:
            raise ConfigError(f"torque_limit must be > 0 (got {self.torque_limit})")
        if not self.gravity >= 0:
            raise ConfigError(f"gravity must be >= 0 (got {self.gravity})")
        for name in ("lip_offset", "half_width", "depth"):
            if not getattr(self.cup, name) > 0:
                raise ConfigError(f"cup.{name} must be > 0 (got {getattr(self.cup, name)})")
        for name in ("half_width", "rim_half_thickness", "rim_z"):
            if not getattr(self.container, name) > 0:
                raise ConfigError(
                    f"container.{name} must be > 0 (got {getattr(self.container, name)})"
                )
        if len(self.link_lengths) != 3 or any(l <= 0 for l in self.link_lengths):
            raise ConfigError(f"link_lengths must be 3 positive values (got {self.link_lengths})")
        if len(self.joint_damping) != 3 or any(c < 0 for c in self.joint_damping):
            raise ConfigError(f"joint_damping must be 3 non-negative values (got {self.joint_damping})")
        if not self.emission_rate_max > 0:
            raise ConfigError(f"emission_rate_max must be > 0 (got {self.emission_rate_max})")
        if not 0 < self.initial_fill <= 1:
            raise ConfigError(f"initial_fill must be in (0, 1] (got {self.initial_fill})")
        if not self.emission_gain > 0:
            raise ConfigError(f"emission_gain must be > 0 (got {self.emission_gain})")
        if self.jet_speed < 0 or self.jet_jitter < 0:
            raise ConfigError("jet_speed and jet_jitter must be >= 0")
        if self.cup_mass < 0:
            raise ConfigError(f"cup_mass must be >= 0 (got {self.cup_mass})")
        for lo, hi, home in zip(self.joint_limits_low, self.joint_limits_high, self.home_angles):
            if not lo < hi:
                raise ConfigError(f"joint_limits_low must be < joint_limits_high (got {lo} >= {hi})")
            if not lo <= home <= hi:
                raise ConfigError(f"home_angles must lie within joint limits (got {home})")
        return self
