"""Physical constants of the simulated vehicle."""

from __future__ import annotations

import math
from dataclasses import dataclass, fields


@dataclass(frozen=True)
class QuadParams:
    """Rigid-body and rotor constants of the quadrotor.

    Defaults describe the reference airframe used throughout the test
    scenarios: a 1.96 kg cross-configuration frame with 0.59 m arms.

    Attributes:
        m: total mass (kg).
        g: gravitational acceleration (m/s^2).
        ixx, iyy, izz: principal moments of inertia (kg m^2).
        arm_length: rotor-to-center-of-mass distance (m).
        kt: rotor thrust coefficient (N s^2 / rad^2).
        km: rotor reaction-torque coefficient (N m s^2 / rad^2).
    """

    m: float = 1.96
    g: float = 9.81
    ixx: float = 0.0149
    iyy: float = 0.0153
    izz: float = 0.0532
    arm_length: float = 0.59
    kt: float = 2.06e-7
    km: float = 1.01e-10

    def __post_init__(self) -> None:
        for f in fields(self):
            value = getattr(self, f.name)
            if not math.isfinite(value) or value <= 0.0:
                raise ValueError(f"QuadParams.{f.name} must be strictly positive, got {value}")
