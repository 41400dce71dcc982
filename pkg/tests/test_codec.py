import struct

import numpy as np
import pytest

from quadsim.messages import (
    HEADER_SIZE,
    IMU_TOPIC,
    MOTOR_COMMANDS_TOPIC,
    POSE_TOPIC,
    TOPICS,
    VELOCITY_TOPIC,
    BadMagicError,
    BadVersionError,
    DecodeError,
    EncodeError,
    ImuPayload,
    MotorCommandPayload,
    PayloadSizeError,
    PosePayload,
    TopicMessage,
    TrailingBytesError,
    TruncatedFrameError,
    TwistPayload,
    UnknownTopicError,
    decode_frame,
    encode_frame,
)
from quadsim.rotation import EulerAngles, Quaternion, euler_to_quaternion


def random_quaternion(rng) -> Quaternion:
    v = rng.normal(size=4)
    v /= np.linalg.norm(v)
    return Quaternion(*v)


def random_message(rng) -> TopicMessage:
    topic = rng.choice(list(TOPICS))
    seq = int(rng.integers(0, 2**63))
    stamp = int(rng.integers(-(2**62), 2**62))
    if topic == MOTOR_COMMANDS_TOPIC:
        payload = MotorCommandPayload(tuple(rng.uniform(0, 9000, 4)))
    elif topic == POSE_TOPIC:
        payload = PosePayload(tuple(rng.normal(0, 100, 3)), random_quaternion(rng))
    elif topic == VELOCITY_TOPIC:
        payload = TwistPayload(tuple(rng.normal(0, 10, 3)), tuple(rng.normal(0, 5, 3)))
    else:
        payload = ImuPayload(random_quaternion(rng), tuple(rng.normal(0, 5, 3)))
    return TopicMessage(topic, seq, stamp, payload)


ZERO_CMD = TopicMessage(MOTOR_COMMANDS_TOPIC, 0, 0, MotorCommandPayload((0.0, 0.0, 0.0, 0.0)))


class TestEncode:
    def test_zero_motor_command_frame_bytes(self):
        frame = encode_frame(ZERO_CMD)
        expected = (
            b"QSIM"
            + bytes([1, 1])
            + (0).to_bytes(8, "little")
            + (0).to_bytes(8, "little", signed=True)
            + (32).to_bytes(2, "little")
            + b"\x00" * 32
        )
        assert frame == expected

    def test_payload_sizes(self):
        assert TOPICS[MOTOR_COMMANDS_TOPIC].payload_size == 32
        assert TOPICS[POSE_TOPIC].payload_size == 56
        assert TOPICS[VELOCITY_TOPIC].payload_size == 48
        assert TOPICS[IMU_TOPIC].payload_size == 56

    def test_encode_deterministic(self):
        msg = random_message(np.random.default_rng(9))
        assert encode_frame(msg) == encode_frame(msg)

    def test_type_mismatch_fault(self):
        bad = TopicMessage(POSE_TOPIC, 0, 0, MotorCommandPayload((0.0, 0.0, 0.0, 0.0)))
        with pytest.raises(EncodeError):
            encode_frame(bad)
        with pytest.raises(EncodeError):
            encode_frame(TopicMessage("/nope", 0, 0, MotorCommandPayload((0.0, 0.0, 0.0, 0.0))))

    def test_pose_field_order_on_wire(self):
        q = euler_to_quaternion(EulerAngles(0.1, 0.2, 0.3))
        frame = encode_frame(TopicMessage(POSE_TOPIC, 0, 0, PosePayload((1.0, 2.0, 3.0), q)))
        values = struct.unpack_from("<7d", frame, HEADER_SIZE)
        assert values[:3] == (1.0, 2.0, 3.0)
        assert values[3:] == (q.w, q.x, q.y, q.z)


class TestRoundTrip:
    def test_thousand_random_messages(self):
        rng = np.random.default_rng(2024)
        for _ in range(1000):
            msg = random_message(rng)
            assert decode_frame(encode_frame(msg)) == msg


class TestDecodeErrors:
    def test_bad_magic(self):
        frame = bytearray(encode_frame(ZERO_CMD))
        frame[0] = ord("X")
        with pytest.raises(BadMagicError):
            decode_frame(bytes(frame))

    def test_bad_version(self):
        frame = bytearray(encode_frame(ZERO_CMD))
        frame[4] = 9
        with pytest.raises(BadVersionError):
            decode_frame(bytes(frame))

    def test_unknown_topic_id(self):
        frame = bytearray(encode_frame(ZERO_CMD))
        frame[5] = 42
        with pytest.raises(UnknownTopicError):
            decode_frame(bytes(frame))

    def test_truncated_header(self):
        with pytest.raises(TruncatedFrameError):
            decode_frame(encode_frame(ZERO_CMD)[: HEADER_SIZE - 3])

    def test_truncated_payload(self):
        with pytest.raises(TruncatedFrameError):
            decode_frame(encode_frame(ZERO_CMD)[:-5])

    def test_trailing_garbage(self):
        with pytest.raises(TrailingBytesError):
            decode_frame(encode_frame(ZERO_CMD) + b"\x00")

    def test_payload_length_mismatch(self):
        frame = bytearray(encode_frame(ZERO_CMD))
        struct.pack_into("<H", frame, HEADER_SIZE - 2, 48)
        with pytest.raises(PayloadSizeError):
            decode_frame(bytes(frame))


class TestHeaderMutationProperty:
    def test_single_byte_mutations_detected_or_change_identity(self):
        rng = np.random.default_rng(77)
        msg = random_message(rng)
        frame = encode_frame(msg)
        original = (msg.topic, msg.seq, msg.stamp_ns)
        for pos in range(HEADER_SIZE):
            for mutation in (0xFF, 0x01, 0x80):
                mutated = bytearray(frame)
                mutated[pos] ^= mutation
                if bytes(mutated) == frame:
                    continue
                try:
                    decoded = decode_frame(bytes(mutated))
                except DecodeError:
                    continue
                assert (decoded.topic, decoded.seq, decoded.stamp_ns) != original
