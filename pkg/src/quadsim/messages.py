"""Topic taxonomy and the binary wire format shared by both transports.

Frame layout, little-endian throughout:

    magic       4 bytes  b"QSIM"
    version     u8       1
    topic_id    u8       1..4
    seq         u64
    stamp_ns    i64
    payload_len u16
    payload     packed f64 fields in declaration order

Payload sizes are fixed per topic: motor commands 32 bytes, pose 56,
velocity 48, IMU 56.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass

from .rotation import Quaternion

MOTOR_COMMANDS_TOPIC = "/drone/motor_commands"
POSE_TOPIC = "/drone/Pose"
VELOCITY_TOPIC = "/drone/Velocity"
IMU_TOPIC = "/drone/Imu"

MAGIC = b"QSIM"
WIRE_VERSION = 1

_HEADER = struct.Struct("<4sBBQqH")
HEADER_SIZE = _HEADER.size


class EncodeError(ValueError):
    """Payload does not match the topic's registered type."""


class DecodeError(ValueError):
    """Base class for wire-format decoding failures."""


class BadMagicError(DecodeError):
    pass


class BadVersionError(DecodeError):
    pass


class UnknownTopicError(DecodeError):
    pass


class TruncatedFrameError(DecodeError):
    pass


class TrailingBytesError(DecodeError):
    pass


class PayloadSizeError(DecodeError):
    """Declared payload length disagrees with the topic's fixed size."""


class MalformedPayloadError(DecodeError):
    """Payload bytes decoded to values violating the payload invariants."""


def _vec3(values) -> tuple[float, float, float]:
    a, b, c = (float(v) for v in values)
    if not (math.isfinite(a) and math.isfinite(b) and math.isfinite(c)):
        raise ValueError(f"non-finite vector ({a}, {b}, {c})")
    return (a, b, c)


@dataclass(frozen=True)
class MotorCommandPayload:
    """Four rotor speed commands (rad/s)."""

    speeds: tuple[float, float, float, float]

    def __post_init__(self) -> None:
        if len(self.speeds) != 4:
            raise ValueError("motor command needs exactly four speeds")
        for v in self.speeds:
            if not math.isfinite(v) or v < 0.0:
                raise ValueError(f"motor speed must be finite and >= 0, got {v}")

    def to_floats(self) -> tuple[float, ...]:
        return self.speeds

    @classmethod
    def from_floats(cls, vals) -> "MotorCommandPayload":
        return cls(tuple(float(v) for v in vals))


@dataclass(frozen=True)
class PosePayload:
    """Earth-frame position (m) and body-to-earth orientation."""

    position: tuple[float, float, float]
    orientation: Quaternion

    def __post_init__(self) -> None:
        object.__setattr__(self, "position", _vec3(self.position))

    def to_floats(self) -> tuple[float, ...]:
        q = self.orientation
        return (*self.position, q.w, q.x, q.y, q.z)

    @classmethod
    def from_floats(cls, vals) -> "PosePayload":
        return cls(tuple(vals[0:3]), Quaternion(*vals[3:7]))


@dataclass(frozen=True)
class TwistPayload:
    """Earth-frame linear velocity (m/s) and body angular rates (rad/s)."""

    linear: tuple[float, float, float]
    angular: tuple[float, float, float]

    def __post_init__(self) -> None:
        object.__setattr__(self, "linear", _vec3(self.linear))
        object.__setattr__(self, "angular", _vec3(self.angular))

    def to_floats(self) -> tuple[float, ...]:
        return (*self.linear, *self.angular)

    @classmethod
    def from_floats(cls, vals) -> "TwistPayload":
        return cls(tuple(vals[0:3]), tuple(vals[3:6]))


@dataclass(frozen=True)
class ImuPayload:
    """Simulated IMU output: orientation plus body angular velocity."""

    orientation: Quaternion
    angular_velocity: tuple[float, float, float]

    def __post_init__(self) -> None:
        object.__setattr__(self, "angular_velocity", _vec3(self.angular_velocity))

    def to_floats(self) -> tuple[float, ...]:
        q = self.orientation
        return (q.w, q.x, q.y, q.z, *self.angular_velocity)

    @classmethod
    def from_floats(cls, vals) -> "ImuPayload":
        return cls(Quaternion(*vals[0:4]), tuple(vals[4:7]))


@dataclass(frozen=True)
class TopicSpec:
    name: str
    topic_id: int
    payload_type: type
    packer: struct.Struct

    @property
    def payload_size(self) -> int:
        return self.packer.size


TOPICS: dict[str, TopicSpec] = {
    MOTOR_COMMANDS_TOPIC: TopicSpec(MOTOR_COMMANDS_TOPIC, 1, MotorCommandPayload, struct.Struct("<4d")),
    POSE_TOPIC: TopicSpec(POSE_TOPIC, 2, PosePayload, struct.Struct("<7d")),
    VELOCITY_TOPIC: TopicSpec(VELOCITY_TOPIC, 3, TwistPayload, struct.Struct("<6d")),
    IMU_TOPIC: TopicSpec(IMU_TOPIC, 4, ImuPayload, struct.Struct("<7d")),
}

TOPICS_BY_ID: dict[int, TopicSpec] = {spec.topic_id: spec for spec in TOPICS.values()}

ALL_TOPICS = tuple(TOPICS)
STATE_TOPICS = (POSE_TOPIC, VELOCITY_TOPIC, IMU_TOPIC)


@dataclass(frozen=True)
class TopicMessage:
    """One timestamped, sequence-numbered publication on a named topic."""

    topic: str
    seq: int
    stamp_ns: int
    payload: object


def encode_frame(msg: TopicMessage) -> bytes:
    """Serialize a message to its wire frame. Total and deterministic."""
    spec = TOPICS.get(msg.topic)
    if spec is None:
        raise EncodeError(f"unknown topic {msg.topic!r}")
    if type(msg.payload) is not spec.payload_type:
        raise EncodeError(
            f"topic {msg.topic!r} carries {spec.payload_type.__name__}, got {type(msg.payload).__name__}"
        )
    payload = spec.packer.pack(*msg.payload.to_floats())
    header = _HEADER.pack(MAGIC, WIRE_VERSION, spec.topic_id, msg.seq, msg.stamp_ns, len(payload))
    return header + payload


def decode_frame(data: bytes) -> TopicMessage:
    """Parse a wire frame back into a TopicMessage.

    Raises a distinct DecodeError subclass for each failure mode; a frame
    is either decoded in full or rejected, never partially delivered.
    """
    if len(data) < HEADER_SIZE:
        raise TruncatedFrameError(f"frame of {len(data)} bytes is shorter than the {HEADER_SIZE}-byte header")
    magic, version, topic_id, seq, stamp_ns, payload_len = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise BadMagicError(f"bad magic {magic!r}")
    if version != WIRE_VERSION:
        raise BadVersionError(f"unsupported wire version {version}")
    spec = TOPICS_BY_ID.get(topic_id)
    if spec is None:
        raise UnknownTopicError(f"unknown topic id {topic_id}")
    if payload_len != spec.payload_size:
        raise PayloadSizeError(
            f"topic {spec.name!r} expects {spec.payload_size} payload bytes, header declares {payload_len}"
        )
    if len(data) < HEADER_SIZE + payload_len:
        raise TruncatedFrameError(
            f"payload truncated: have {len(data) - HEADER_SIZE} of {payload_len} bytes"
        )
    if len(data) > HEADER_SIZE + payload_len:
        raise TrailingBytesError(f"{len(data) - HEADER_SIZE - payload_len} trailing bytes after payload")
    values = spec.packer.unpack_from(data, HEADER_SIZE)
    try:
        payload = spec.payload_type.from_floats(values)
    except ValueError as exc:
        raise MalformedPayloadError(str(exc)) from exc
    return TopicMessage(spec.name, seq, stamp_ns, payload)
