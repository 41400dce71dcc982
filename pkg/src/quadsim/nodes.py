"""Plant-side node: advances the vehicle model and publishes its state.

The node consumes the newest motor command from its keep-last-1 slot
(zeros until the first command arrives) and publishes pose, velocity and
IMU topics each plant tick, converting the integrated Euler attitude to a
quaternion for transport.
"""

from __future__ import annotations

from .bus import Subscription
from .dynamics import MotorSpeeds, QuadParams, VehicleState, ZERO_SPEEDS, plant_step
from .messages import (
    IMU_TOPIC,
    POSE_TOPIC,
    VELOCITY_TOPIC,
    ImuPayload,
    MotorCommandPayload,
    PosePayload,
    TwistPayload,
)
from .rotation import euler_to_quaternion


class PlantNode:
    """Owns the vehicle state; steps it and publishes state topics.

    mute_after suppresses publications at times strictly greater than the
    given value; it exists for fault-injection runs exercising the
    controller's safety branch.
    """

    def __init__(
        self,
        p: QuadParams,
        publish,
        command_sub: Subscription,
        full_rotational: bool = True,
        state: VehicleState | None = None,
        mute_after: float | None = None,
    ):
        self.params = p
        self.state = state if state is not None else VehicleState.zero()
        self.full_rotational = full_rotational
        self.mute_after = mute_after
        self._publish = publish
        self._command_sub = command_sub

    def current_command(self) -> MotorSpeeds:
        snap = self._command_sub.snapshot()
        if snap.message is None:
            return ZERO_SPEEDS
        payload: MotorCommandPayload = snap.message.payload
        return MotorSpeeds(*payload.speeds)

    def publish_state(self, now: float) -> None:
        if self.mute_after is not None and now > self.mute_after:
            return
        s = self.state
        quat = euler_to_quaternion(s.attitude)
        self._publish(POSE_TOPIC, PosePayload(position=tuple(s.position), orientation=quat), now)
        self._publish(
            VELOCITY_TOPIC,
            TwistPayload(linear=tuple(s.velocity), angular=tuple(s.body_rates)),
            now,
        )
        self._publish(IMU_TOPIC, ImuPayload(orientation=quat, angular_velocity=tuple(s.body_rates)), now)

    def step(self, dt: float) -> VehicleState:
        """Advance one plant tick under the newest received command."""
        self.state = plant_step(self.state, self.current_command(), self.params, dt, self.full_rotational)
        return self.state
