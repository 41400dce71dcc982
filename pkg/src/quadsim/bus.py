"""In-process topic bus with keep-last-1 subscriptions.

The bus delivers publications synchronously to every subscription of the
topic. A subscription retains only the newest message; reads return the
message together with the receive time in the bus's clock domain. The
same Subscription object is reused by the UDP transport, where a receive
thread and a timer thread share it, so replace-and-read is guarded by a
lock.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

from .messages import TOPICS, TopicMessage


class TopicError(RuntimeError):
    """Unregistered topic, payload type mismatch, or stamp regression."""


@dataclass(frozen=True)
class TopicSnapshot:
    """Newest message on a topic plus its receive time, if any."""

    message: TopicMessage | None
    receive_time: float | None

    @property
    def received(self) -> bool:
        return self.message is not None


EMPTY_SNAPSHOT = TopicSnapshot(None, None)


class Subscription:
    """Keep-last-1 slot for one topic; atomic replace-and-read."""

    def __init__(self, topic: str):
        self.topic = topic
        self._lock = threading.Lock()
        self._latest: TopicMessage | None = None
        self._receive_time: float | None = None

    def deliver(self, msg: TopicMessage, receive_time: float) -> bool:
        """Store msg unless an equal-or-newer seq is already present."""
        with self._lock:
            if self._latest is not None and msg.seq <= self._latest.seq:
                return False
            self._latest = msg
            self._receive_time = receive_time
            return True

    def snapshot(self) -> TopicSnapshot:
        with self._lock:
            return TopicSnapshot(self._latest, self._receive_time)


class Bus:
    """Named topics, per-topic sequence numbers, and a settable clock."""

    def __init__(self):
        self._registered: dict[str, type] = {}
        self._subs: dict[str, list[Subscription]] = {}
        self._seq: dict[str, int] = {}
        self._last_stamp: dict[str, int] = {}
        self.now = 0.0
        self.journal: list[TopicMessage] = []

    def register(self, topic: str) -> None:
        spec = TOPICS.get(topic)
        if spec is None:
            raise TopicError(f"no payload type known for topic {topic!r}")
        self._registered[topic] = spec.payload_type
        self._subs.setdefault(topic, [])

    def register_all(self) -> None:
        for topic in TOPICS:
            self.register(topic)

    def subscribe(self, topic: str) -> Subscription:
        if topic not in self._registered:
            raise TopicError(f"subscribe to unregistered topic {topic!r}")
        sub = Subscription(topic)
        self._subs[topic].append(sub)
        return sub

    def publish(self, topic: str, payload, stamp_ns: int) -> TopicMessage:
        payload_type = self._registered.get(topic)
        if payload_type is None:
            raise TopicError(f"publish to unregistered topic {topic!r}")
        if type(payload) is not payload_type:
            raise TopicError(
                f"topic {topic!r} carries {payload_type.__name__}, got {type(payload).__name__}"
            )
        last = self._last_stamp.get(topic)
        if last is not None and stamp_ns < last:
            raise TopicError(f"stamp regression on {topic!r}: {stamp_ns} < {last}")
        self._last_stamp[topic] = stamp_ns
        seq = self._seq.get(topic, 0)
        self._seq[topic] = seq + 1
        msg = TopicMessage(topic, seq, stamp_ns, payload)
        self.journal.append(msg)
        for sub in self._subs[topic]:
            sub.deliver(msg, self.now)
        return msg

    def publisher(self):
        """Node-facing publish callable: (topic, payload, now_seconds)."""

        def publish(topic: str, payload, now: float) -> None:
            self.publish(topic, payload, int(round(now * 1e9)))

        return publish
