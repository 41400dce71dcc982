"""Hierarchical flight controller.

The inner loop is per-axis LQR attitude feedback producing body moments;
the outer altitude loop is PD with a gravity feedforward, tilt-compensated
by 1 / (cos(theta) cos(phi)). Moments and thrust are allocated to rotor
speeds by inverting the mixing matrix. ControllerNode wraps the pure
control law into the periodic node loop: read newest sensor topics, fall
back to the safety command when data is stale or missing, publish motor
commands.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bus import EMPTY_SNAPSHOT, Subscription, TopicSnapshot
from .dynamics import ControlVector, MotorSpeeds, hover_speed, mixing_matrix
from .lqr import ChannelGains, LqrWeights, solve_channel_are
from .messages import (
    IMU_TOPIC,
    MOTOR_COMMANDS_TOPIC,
    POSE_TOPIC,
    VELOCITY_TOPIC,
    ImuPayload,
    MotorCommandPayload,
    PosePayload,
    TwistPayload,
)
from .params import QuadParams
from .rotation import EulerAngles, GimbalLockError, quaternion_to_euler

# cos(theta) * cos(phi) below this is treated as a loss of attitude.
TILT_GUARD = 0.2


class TiltGuardError(RuntimeError):
    """Attitude too far from level for the thrust law to be meaningful."""


class AllocationError(RuntimeError):
    """Mixing matrix is singular; the vehicle geometry is misconfigured."""


@dataclass(frozen=True)
class AltitudeGains:
    """Proportional (N/m) and derivative (N s/m) altitude gains."""

    kp: float
    kd: float

    def __post_init__(self) -> None:
        if not (self.kp > 0.0 and self.kd > 0.0):
            raise ValueError(f"altitude gains must be positive, got {self}")


@dataclass(frozen=True)
class Setpoint:
    """Commanded altitude (m) and attitude (rad)."""

    z_des: float = 0.0
    phi_des: float = 0.0
    theta_des: float = 0.0
    psi_des: float = 0.0

    def __post_init__(self) -> None:
        if abs(self.phi_des) >= 0.5 or abs(self.theta_des) >= 0.5:
            raise ValueError(f"roll/pitch setpoints must stay below 0.5 rad, got {self}")


@dataclass(frozen=True)
class ControllerConfig:
    """Everything the controller node needs besides the vehicle params."""

    altitude: AltitudeGains
    roll: ChannelGains
    pitch: ChannelGains
    yaw: ChannelGains
    safety_command: MotorSpeeds
    rate_hz: float = 50.0
    staleness_budget: float = 0.1
    schedule: tuple[tuple[float, Setpoint], ...] = ((0.0, Setpoint()),)
    u1_max: float | None = None  # None: 2 * m * g
    omega_max: float | None = None  # None: 2 * hover speed

    def __post_init__(self) -> None:
        if self.rate_hz <= 0.0:
            raise ValueError(f"rate_hz must be positive, got {self.rate_hz}")
        if self.staleness_budget < 1.0 / self.rate_hz:
            raise ValueError(
                f"staleness budget {self.staleness_budget} s is shorter than one period of {self.rate_hz} Hz"
            )
        object.__setattr__(self, "schedule", tuple(sorted(self.schedule, key=lambda e: e[0])))


def fit_altitude_gains(target_overshoot: float, target_peak_time: float, p: QuadParams) -> AltitudeGains:
    """PD gains hitting a target step overshoot fraction and peak time.

    Uses second-order transient relations on the linearized altitude loop
    z_ddot = (kp * error - kd * z_dot) / m.
    """
    if not 0.0 < target_overshoot < 1.0:
        raise ValueError(f"overshoot fraction must be in (0, 1), got {target_overshoot}")
    if target_peak_time <= 0.0:
        raise ValueError(f"peak time must be positive, got {target_peak_time}")
    log_mp = math.log(target_overshoot)
    zeta = -log_mp / math.sqrt(math.pi**2 + log_mp**2)
    wn = math.pi / (target_peak_time * math.sqrt(1.0 - zeta**2))
    return AltitudeGains(kp=p.m * wn**2, kd=2.0 * p.m * zeta * wn)


def default_controller_config(
    p: QuadParams,
    weights: LqrWeights = LqrWeights(1.0, 1.0, 1.0),
    schedule: tuple[tuple[float, Setpoint], ...] = ((0.0, Setpoint()),),
) -> ControllerConfig:
    """Config with ARE-synthesized channel gains and fitted altitude gains.

    The safety command is a neutral hold: four hover-speed rotors (thrust
    about m*g, zero moments).
    """
    wh = hover_speed(p)
    return ControllerConfig(
        altitude=fit_altitude_gains(0.18, 2.5, p),
        roll=solve_channel_are(p.ixx, weights),
        pitch=solve_channel_are(p.iyy, weights),
        yaw=solve_channel_are(p.izz, weights),
        safety_command=MotorSpeeds(wh, wh, wh, wh),
        schedule=schedule,
    )


def attitude_moments(
    att: EulerAngles,
    rates: np.ndarray,
    sp: Setpoint,
    roll: ChannelGains,
    pitch: ChannelGains,
    yaw: ChannelGains,
) -> tuple[float, float, float]:
    """Body moments (u2, u3, u4) from per-axis error/rate feedback."""
    p, q, r = rates
    u2 = roll.k1 * (sp.phi_des - att.phi) - roll.k2 * p
    u3 = pitch.k1 * (sp.theta_des - att.theta) - pitch.k2 * q
    u4 = yaw.k1 * (sp.psi_des - att.psi) - yaw.k2 * r
    return (float(u2), float(u3), float(u4))


def altitude_thrust(
    z: float,
    zdot: float,
    att: EulerAngles,
    sp: Setpoint,
    gains: AltitudeGains,
    p: QuadParams,
    u1_max: float | None = None,
) -> float:
    """Total thrust: gravity feedforward plus PD feedback, tilt-compensated.

    Clamped to [0, u1_max] (default 2*m*g). Raises TiltGuardError when
    cos(theta) * cos(phi) <= TILT_GUARD.
    """
    tilt = math.cos(att.theta) * math.cos(att.phi)
    if tilt <= TILT_GUARD:
        raise TiltGuardError(f"cos(theta)*cos(phi) = {tilt:.3f} is at or below {TILT_GUARD}")
    if u1_max is None:
        u1_max = 2.0 * p.m * p.g
    u1 = (p.m * p.g + gains.kp * (sp.z_des - z) - gains.kd * zdot) / tilt
    return min(max(u1, 0.0), u1_max)


def mixing_matrix_inverse(p: QuadParams) -> np.ndarray:
    """Inverse of the mixing matrix; raises AllocationError if singular."""
    try:
        return np.linalg.inv(mixing_matrix(p))
    except np.linalg.LinAlgError as exc:
        raise AllocationError(f"mixing matrix is singular for {p}") from exc


def allocate_motors(u: ControlVector, p: QuadParams, omega_max: float | None = None) -> MotorSpeeds:
    """Rotor speeds realizing a control vector.

    Inverts the mixing matrix, clamps negative squared speeds to zero,
    takes square roots, and caps each speed at omega_max (default twice
    the hover speed).
    """
    if omega_max is None:
        omega_max = 2.0 * hover_speed(p)
    omega_sq = mixing_matrix_inverse(p) @ u.as_array()
    omega = np.sqrt(np.clip(omega_sq, 0.0, None))
    return MotorSpeeds.from_array(np.clip(omega, 0.0, omega_max))


@dataclass(frozen=True)
class SensorSnapshot:
    """Newest message per sensor topic, as seen at one controller tick."""

    imu: TopicSnapshot = EMPTY_SNAPSHOT
    pose: TopicSnapshot = EMPTY_SNAPSHOT
    velocity: TopicSnapshot = EMPTY_SNAPSHOT


def active_setpoint(schedule, now: float) -> Setpoint:
    """Latest scheduled setpoint whose application time has passed."""
    current = Setpoint()
    for t_apply, sp in schedule:
        if t_apply <= now:
            current = sp
        else:
            break
    return current


def _is_stale(snap: TopicSnapshot, now: float, budget: float) -> bool:
    if snap.message is None or snap.receive_time is None:
        return True
    return (now - snap.receive_time) > budget


def control_loop_tick(
    snapshot: SensorSnapshot, now: float, cfg: ControllerConfig, p: QuadParams
) -> MotorSpeeds:
    """One pass of the controller main loop; pure in (snapshot, now, cfg).

    Publishes nothing itself: returns the motor command, which is the
    safety command whenever any sensor topic is stale or missing, or when
    attitude extraction / the thrust law fault.
    """
    for snap in (snapshot.imu, snapshot.pose, snapshot.velocity):
        if _is_stale(snap, now, cfg.staleness_budget):
            return cfg.safety_command

    imu: ImuPayload = snapshot.imu.message.payload
    pose: PosePayload = snapshot.pose.message.payload
    twist: TwistPayload = snapshot.velocity.message.payload
    try:
        att = quaternion_to_euler(imu.orientation)
        sp = active_setpoint(cfg.schedule, now)
        u2, u3, u4 = attitude_moments(att, imu.angular_velocity, sp, cfg.roll, cfg.pitch, cfg.yaw)
        u1 = altitude_thrust(pose.position[2], twist.linear[2], att, sp, cfg.altitude, p, cfg.u1_max)
        return allocate_motors(ControlVector(u1, u2, u3, u4), p, cfg.omega_max)
    except (GimbalLockError, TiltGuardError):
        return cfg.safety_command


class ControllerNode:
    """Periodic controller node bound to one transport.

    `publish` is a callable (topic, payload, now_seconds) -> None supplied
    by the transport; subscriptions are the node's keep-last-1 sensor
    slots. Ticks may interleave with deliveries on another thread.
    """

    def __init__(
        self,
        cfg: ControllerConfig,
        p: QuadParams,
        publish,
        imu_sub: Subscription,
        pose_sub: Subscription,
        velocity_sub: Subscription,
    ):
        self.cfg = cfg
        self.params = p
        self._publish = publish
        self._imu = imu_sub
        self._pose = pose_sub
        self._velocity = velocity_sub
        mixing_matrix_inverse(p)  # fail at startup if the geometry is degenerate

    def tick(self, now: float) -> MotorSpeeds:
        """Run one control cycle and publish the motor command."""
        snapshot = SensorSnapshot(
            imu=self._imu.snapshot(), pose=self._pose.snapshot(), velocity=self._velocity.snapshot()
        )
        speeds = control_loop_tick(snapshot, now, self.cfg, self.params)
        payload = MotorCommandPayload(speeds=(speeds.w1, speeds.w2, speeds.w3, speeds.w4))
        self._publish(MOTOR_COMMANDS_TOPIC, payload, now)
        return speeds


def node_subscriptions(bus) -> dict[str, Subscription]:
    """Sensor subscriptions a controller node needs, keyed by topic."""
    return {topic: bus.subscribe(topic) for topic in (IMU_TOPIC, POSE_TOPIC, VELOCITY_TOPIC)}
