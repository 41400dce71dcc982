"""Attitude representations and conversions.

Euler angles follow the Z-Y-X (yaw, pitch, roll) rotation sequence with the
earth frame in ENU convention. Quaternions are unit, scalar-first, and
represent the body-to-earth rotation: ``quaternion_to_matrix(q)`` equals
``rotation_enu_to_body(att).T`` for ``q = euler_to_quaternion(att)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Pitch magnitude at which a run is terminated rather than wrapped.
GIMBAL_PITCH_LIMIT = math.pi / 2 - 1e-6

# |sin(theta)| beyond which quaternion-to-Euler extraction is rejected.
GIMBAL_SIN_LIMIT = 1.0 - 1e-9

QUATERNION_NORM_TOL = 1e-9


class GimbalLockError(RuntimeError):
    """Pitch reached the Euler-angle singularity; the run cannot continue."""


@dataclass(frozen=True)
class EulerAngles:
    """Roll, pitch, yaw in radians (Z-Y-X sequence)."""

    phi: float
    theta: float
    psi: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.phi) and math.isfinite(self.theta) and math.isfinite(self.psi)):
            raise ValueError(f"non-finite Euler angles: {self}")
        if abs(self.theta) >= math.pi / 2:
            raise GimbalLockError(f"pitch {self.theta} rad is outside the (-pi/2, pi/2) envelope")

    def as_array(self) -> np.ndarray:
        return np.array([self.phi, self.theta, self.psi])


@dataclass(frozen=True)
class Quaternion:
    """Unit quaternion, scalar-first component order."""

    w: float
    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        norm = math.sqrt(self.w**2 + self.x**2 + self.y**2 + self.z**2)
        if not math.isfinite(norm) or abs(norm - 1.0) > QUATERNION_NORM_TOL:
            raise ValueError(f"quaternion norm {norm} departs from 1 by more than {QUATERNION_NORM_TOL}")

    def as_array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z])


def _check_pitch(theta: float) -> None:
    if abs(theta) >= GIMBAL_PITCH_LIMIT:
        raise GimbalLockError(f"pitch {theta} rad is within {GIMBAL_PITCH_LIMIT - abs(theta):.2e} of gimbal lock")


def rotation_enu_to_body(att: EulerAngles) -> np.ndarray:
    """Direction cosine matrix taking earth-frame (ENU) vectors into the body frame.

    Raises GimbalLockError when the pitch magnitude is at or beyond the
    termination threshold.
    """
    _check_pitch(att.theta)
    cphi, sphi = math.cos(att.phi), math.sin(att.phi)
    cth, sth = math.cos(att.theta), math.sin(att.theta)
    cpsi, spsi = math.cos(att.psi), math.sin(att.psi)
    return np.array(
        [
            [cth * cpsi, cth * spsi, -sth],
            [sphi * sth * cpsi - cphi * spsi, sphi * sth * spsi + cphi * cpsi, sphi * cth],
            [cphi * sth * cpsi + sphi * spsi, cphi * sth * spsi - sphi * cpsi, cphi * cth],
        ]
    )


def euler_to_quaternion(att: EulerAngles) -> Quaternion:
    """Z-Y-X Euler angles to a scalar-first unit quaternion with w >= 0."""
    cr, sr = math.cos(att.phi / 2), math.sin(att.phi / 2)
    cp, sp = math.cos(att.theta / 2), math.sin(att.theta / 2)
    cy, sy = math.cos(att.psi / 2), math.sin(att.psi / 2)
    w = cr * cp * cy + sr * sp * sy
    x = sr * cp * cy - cr * sp * sy
    y = cr * sp * cy + sr * cp * sy
    z = cr * cp * sy - sr * sp * cy
    if w < 0.0:
        w, x, y, z = -w, -x, -y, -z
    return Quaternion(w, x, y, z)


def quaternion_to_euler(q: Quaternion) -> EulerAngles:
    """Inverse of euler_to_quaternion away from the pitch singularity.

    Raises GimbalLockError when |sin(pitch)| exceeds GIMBAL_SIN_LIMIT.
    """
    sin_theta = 2.0 * (q.w * q.y - q.x * q.z)
    if abs(sin_theta) > GIMBAL_SIN_LIMIT:
        raise GimbalLockError(f"quaternion pitch is within {1 - abs(sin_theta):.2e} of +/-90 deg")
    phi = math.atan2(2.0 * (q.w * q.x + q.y * q.z), 1.0 - 2.0 * (q.x**2 + q.y**2))
    theta = math.asin(sin_theta)
    psi = math.atan2(2.0 * (q.w * q.z + q.x * q.y), 1.0 - 2.0 * (q.y**2 + q.z**2))
    return EulerAngles(phi, theta, psi)


def quaternion_to_matrix(q: Quaternion) -> np.ndarray:
    """Rotation matrix taking body-frame vectors into the earth frame."""
    w, x, y, z = q.w, q.x, q.y, q.z
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )
