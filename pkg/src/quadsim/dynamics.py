"""Nonlinear six-degree-of-freedom plant model.

Translation is integrated directly in the earth (ENU) frame; attitude is
integrated as Euler angles with the small-angle rate relation
(phi_dot, theta_dot, psi_dot) = (p, q, r), which is the regime the attitude
controller is designed for. Rotor thrust is kt * omega^2 per motor with no
spin-up lag; the mixing matrix maps squared speeds to total thrust and the
three body moments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .params import QuadParams
from .rotation import GIMBAL_PITCH_LIMIT, EulerAngles, GimbalLockError


class NonFiniteStateError(RuntimeError):
    """Integration produced a non-finite state; carries a diagnostic dump."""


@dataclass(frozen=True)
class MotorSpeeds:
    """Angular velocities of the four rotors (rad/s), all non-negative."""

    w1: float
    w2: float
    w3: float
    w4: float

    def __post_init__(self) -> None:
        for name in ("w1", "w2", "w3", "w4"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0.0:
                raise ValueError(f"MotorSpeeds.{name} must be finite and >= 0, got {value}")

    def as_array(self) -> np.ndarray:
        return np.array([self.w1, self.w2, self.w3, self.w4])

    @classmethod
    def from_array(cls, values) -> "MotorSpeeds":
        w1, w2, w3, w4 = (float(v) for v in values)
        return cls(w1, w2, w3, w4)


ZERO_SPEEDS = MotorSpeeds(0.0, 0.0, 0.0, 0.0)


@dataclass(frozen=True)
class ControlVector:
    """Total thrust u1 (N) and body moments u2, u3, u4 (N m)."""

    u1: float
    u2: float
    u3: float
    u4: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.u1) or self.u1 < 0.0:
            raise ValueError(f"ControlVector.u1 must be finite and >= 0, got {self.u1}")

    def as_array(self) -> np.ndarray:
        return np.array([self.u1, self.u2, self.u3, self.u4])


@dataclass
class VehicleState:
    """Twelve-dimensional rigid-body state plus simulation time.

    position/velocity are earth-frame ENU (m, m/s); body_rates are the
    body-frame angular rates p, q, r (rad/s).
    """

    position: np.ndarray
    velocity: np.ndarray
    attitude: EulerAngles
    body_rates: np.ndarray
    t: float = 0.0

    def __post_init__(self) -> None:
        self.position = np.asarray(self.position, dtype=float).reshape(3)
        self.velocity = np.asarray(self.velocity, dtype=float).reshape(3)
        self.body_rates = np.asarray(self.body_rates, dtype=float).reshape(3)
        if not (
            np.all(np.isfinite(self.position))
            and np.all(np.isfinite(self.velocity))
            and np.all(np.isfinite(self.body_rates))
            and math.isfinite(self.t)
        ):
            raise NonFiniteStateError(f"non-finite vehicle state: {self}")

    @classmethod
    def zero(cls) -> "VehicleState":
        return cls(np.zeros(3), np.zeros(3), EulerAngles(0.0, 0.0, 0.0), np.zeros(3), 0.0)

    def as_vector(self) -> np.ndarray:
        """Flatten to [x, y, z, vx, vy, vz, phi, theta, psi, p, q, r]."""
        out = np.empty(12)
        out[0:3] = self.position
        out[3:6] = self.velocity
        out[6:9] = (self.attitude.phi, self.attitude.theta, self.attitude.psi)
        out[9:12] = self.body_rates
        return out

    @classmethod
    def from_vector(cls, vec: np.ndarray, t: float) -> "VehicleState":
        vec = np.asarray(vec, dtype=float)
        att = EulerAngles(float(vec[6]), float(vec[7]), float(vec[8]))
        return cls(vec[0:3].copy(), vec[3:6].copy(), att, vec[9:12].copy(), t)


def mixing_matrix(p: QuadParams) -> np.ndarray:
    """4x4 map from squared rotor speeds to (u1, u2, u3, u4)."""
    lkt = p.arm_length * p.kt
    return np.array(
        [
            [p.kt, p.kt, p.kt, p.kt],
            [0.0, -lkt, 0.0, lkt],
            [-lkt, 0.0, lkt, 0.0],
            [p.km, -p.km, p.km, -p.km],
        ]
    )


def mix_forward(w: MotorSpeeds, p: QuadParams) -> ControlVector:
    """Total thrust and body moments produced by the four rotors."""
    u = mixing_matrix(p) @ (w.as_array() ** 2)
    return ControlVector(float(u[0]), float(u[1]), float(u[2]), float(u[3]))


def hover_speed(p: QuadParams) -> float:
    """Equal rotor speed (rad/s) at which total thrust balances weight."""
    return math.sqrt(p.m * p.g / (4.0 * p.kt))


def translational_accel(att: EulerAngles, u1: float, p: QuadParams) -> np.ndarray:
    """Earth-frame acceleration from body-z thrust u1 and gravity."""
    cphi, sphi = math.cos(att.phi), math.sin(att.phi)
    cth, sth = math.cos(att.theta), math.sin(att.theta)
    cpsi, spsi = math.cos(att.psi), math.sin(att.psi)
    a = u1 / p.m
    return np.array(
        [
            a * (cpsi * sth * cphi + spsi * sphi),
            a * (spsi * sth * cphi - cpsi * sphi),
            a * (cth * cphi) - p.g,
        ]
    )


def rotational_accel(rates: np.ndarray, moments, p: QuadParams, full: bool = True) -> np.ndarray:
    """Body angular acceleration (p_dot, q_dot, r_dot).

    With full=True the gyroscopic cross terms (Iyy - Izz) q r etc. are
    included; full=False drops them, leaving the decoupled moment/inertia
    form the attitude controller is designed against.
    """
    u2, u3, u4 = moments
    if not full:
        return np.array([u2 / p.ixx, u3 / p.iyy, u4 / p.izz])
    pr, qr, rr = rates
    return np.array(
        [
            (u2 + (p.iyy - p.izz) * qr * rr) / p.ixx,
            (u3 + (p.izz - p.ixx) * pr * rr) / p.iyy,
            (u4 + (p.ixx - p.iyy) * pr * qr) / p.izz,
        ]
    )


def state_derivative(s: VehicleState, w: MotorSpeeds, p: QuadParams, full: bool = True) -> np.ndarray:
    """Time derivative of the flattened 12-state under constant motor speeds."""
    u = mix_forward(w, p)
    return _derivative(s.as_vector(), u, p, full)


def _derivative(y: np.ndarray, u: ControlVector, p: QuadParams, full: bool) -> np.ndarray:
    theta = y[7]
    if abs(theta) >= GIMBAL_PITCH_LIMIT:
        raise GimbalLockError(f"pitch {theta} rad crossed the gimbal-lock threshold")
    att = EulerAngles(float(y[6]), float(theta), float(y[8]))
    out = np.empty(12)
    out[0:3] = y[3:6]
    out[3:6] = translational_accel(att, u.u1, p)
    out[6:9] = y[9:12]
    out[9:12] = rotational_accel(y[9:12], (u.u2, u.u3, u.u4), p, full)
    return out


def plant_step(s: VehicleState, w: MotorSpeeds, p: QuadParams, dt: float, full: bool = True) -> VehicleState:
    """Advance the state by one classical RK4 step of length dt.

    Motor speeds are held constant across the step (zero-order hold).
    Raises NonFiniteStateError with a diagnostic dump if the result is not
    finite, and propagates GimbalLockError from the derivative evaluations.
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    u = mix_forward(w, p)
    y0 = s.as_vector()
    k1 = _derivative(y0, u, p, full)
    k2 = _derivative(y0 + 0.5 * dt * k1, u, p, full)
    k3 = _derivative(y0 + 0.5 * dt * k2, u, p, full)
    k4 = _derivative(y0 + dt * k3, u, p, full)
    y1 = y0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.all(np.isfinite(y1)):
        raise NonFiniteStateError(
            f"non-finite state after step from t={s.t}: state={y0.tolist()}, "
            f"speeds={w.as_array().tolist()}, result={y1.tolist()}"
        )
    return VehicleState.from_vector(y1, s.t + dt)
