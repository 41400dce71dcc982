"""Wall-clock UDP transport: one wire frame per datagram.

Each node owns a bound loopback socket, a receive thread that decodes
datagrams into its keep-last-1 subscription slots, and a timer loop
running at the node's configured rate. Nodes interact only through
datagrams; within a node the subscription slots are the sole state shared
between the receive and timer paths. Datagrams may be lost (there is no
retransmission), and stale ones are discarded by sequence comparison.
"""

from __future__ import annotations

import socket
import threading
import time
from dataclasses import dataclass

from .bus import Subscription
from .control import ControllerConfig, ControllerNode
from .dynamics import NonFiniteStateError, VehicleState
from .messages import (
    IMU_TOPIC,
    MOTOR_COMMANDS_TOPIC,
    POSE_TOPIC,
    TOPICS,
    VELOCITY_TOPIC,
    DecodeError,
    TopicMessage,
    decode_frame,
    encode_frame,
)
from .nodes import PlantNode
from .params import QuadParams
from .rotation import GimbalLockError
from .trace import RunTrace

PAYLOAD_BUDGET = 1200  # bytes per datagram payload; frames must fit


class TransportError(RuntimeError):
    """Socket setup failed or a registered payload exceeds the budget."""


@dataclass(frozen=True)
class Endpoints:
    """UDP addresses of the two nodes."""

    plant_host: str = "127.0.0.1"
    plant_port: int = 47101
    controller_host: str = "127.0.0.1"
    controller_port: int = 47102

    @property
    def plant(self) -> tuple[str, int]:
        return (self.plant_host, self.plant_port)

    @property
    def controller(self) -> tuple[str, int]:
        return (self.controller_host, self.controller_port)


def check_payload_budget(budget: int = PAYLOAD_BUDGET) -> None:
    for spec in TOPICS.values():
        if spec.payload_size > budget:
            raise TransportError(
                f"topic {spec.name!r} payload of {spec.payload_size} bytes exceeds the {budget}-byte budget"
            )


class UdpPort:
    """One node's attachment: bound socket, peer address, receive thread."""

    def __init__(self, bind_addr: tuple[str, int], peer_addr: tuple[str, int], topics: tuple[str, ...], clock):
        check_payload_budget()
        self._sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
        try:
            self._sock.bind(bind_addr)
        except OSError as exc:
            self._sock.close()
            raise TransportError(f"cannot bind UDP endpoint {bind_addr}: {exc}") from exc
        # A blocked recvfrom is not interrupted by close() on Linux; poll
        # with a short timeout and a closing flag instead.
        self._sock.settimeout(0.05)
        self._closing = False
        self._peer = peer_addr
        self._clock = clock
        self._seq: dict[str, int] = {}
        self.subscriptions = {topic: Subscription(topic) for topic in topics}
        self.received: list[tuple[float, TopicMessage]] = []
        self._recv_thread = threading.Thread(target=self._receive_loop, daemon=True)

    def start(self) -> None:
        self._recv_thread.start()

    def publish(self, topic: str, payload, now: float) -> None:
        seq = self._seq.get(topic, 0)
        self._seq[topic] = seq + 1
        frame = encode_frame(TopicMessage(topic, seq, int(round(now * 1e9)), payload))
        try:
            self._sock.sendto(frame, self._peer)
        except OSError:
            pass  # peer gone or socket closing; losses are tolerated

    def _receive_loop(self) -> None:
        while not self._closing:
            try:
                data, _ = self._sock.recvfrom(4096)
            except socket.timeout:
                continue
            except OSError:
                return  # socket closed
            try:
                msg = decode_frame(data)
            except DecodeError:
                continue
            sub = self.subscriptions.get(msg.topic)
            if sub is not None:
                now = self._clock()
                sub.deliver(msg, now)
                self.received.append((now, msg))

    def close(self) -> None:
        self._closing = True
        if self._recv_thread.is_alive():
            self._recv_thread.join(timeout=2.0)
        self._sock.close()


def _timer_loop(clock, period: float, iterations: int, body) -> None:
    """Run body(k, now) at k*period deadlines on the wall clock."""
    for k in range(iterations):
        target = k * period
        while True:
            now = clock()
            if now >= target:
                break
            time.sleep(min(target - now, 0.002))
        body(k, clock())


def udp_run(
    params: QuadParams,
    cfg: ControllerConfig,
    endpoints: Endpoints,
    duration_s: float,
    plant_rate_hz: float = 100.0,
    controller_rate_hz: float = 50.0,
    full_rotational: bool = True,
    initial_state: VehicleState | None = None,
    include_plant: bool = True,
    plant_mute_after: float | None = None,
) -> RunTrace:
    """Run plant and controller against the wall clock, exchanging datagrams.

    Both nodes live in this process as timer threads with their own bound
    sockets; `include_plant=False` leaves the controller running against a
    silent network, and `plant_mute_after` stops the plant's publications
    mid-run. Trace rows carry simulation time; command and receive times
    are wall-clock seconds relative to the run start.
    """
    start = time.monotonic()
    clock = lambda: time.monotonic() - start

    plant_port = UdpPort(endpoints.plant, endpoints.controller, (MOTOR_COMMANDS_TOPIC,), clock)
    try:
        controller_port = UdpPort(endpoints.controller, endpoints.plant, (POSE_TOPIC, VELOCITY_TOPIC, IMU_TOPIC), clock)
    except TransportError:
        plant_port.close()
        raise

    plant = PlantNode(
        params,
        plant_port.publish,
        plant_port.subscriptions[MOTOR_COMMANDS_TOPIC],
        full_rotational=full_rotational,
        state=initial_state,
        mute_after=plant_mute_after,
    )
    controller = ControllerNode(
        cfg,
        params,
        controller_port.publish,
        imu_sub=controller_port.subscriptions[IMU_TOPIC],
        pose_sub=controller_port.subscriptions[POSE_TOPIC],
        velocity_sub=controller_port.subscriptions[VELOCITY_TOPIC],
    )

    trace = RunTrace()
    trace.times.append(plant.state.t)
    trace.states.append(plant.state)
    fault_lock = threading.Lock()

    plant_dt = 1.0 / plant_rate_hz
    n_plant = int(round(duration_s * plant_rate_hz))
    n_ctrl = int(round(duration_s * controller_rate_hz))

    def plant_body(k: int, now: float) -> None:
        if trace.fault is not None:
            return
        try:
            plant.publish_state(now)
            plant.step(plant_dt)
        except (GimbalLockError, NonFiniteStateError) as exc:
            with fault_lock:
                trace.fault = f"{type(exc).__name__}: {exc}"
                trace.fault_time = now
            return
        trace.times.append(plant.state.t)
        trace.states.append(plant.state)

    def controller_body(_k: int, now: float) -> None:
        trace.command_times.append(now)
        trace.commands.append(controller.tick(now))

    threads = [threading.Thread(target=_timer_loop, args=(clock, 1.0 / controller_rate_hz, n_ctrl, controller_body))]
    if include_plant:
        threads.append(threading.Thread(target=_timer_loop, args=(clock, plant_dt, n_plant, plant_body)))

    plant_port.start()
    controller_port.start()
    try:
        for th in threads:
            th.start()
        for th in threads:
            th.join(timeout=duration_s + 10.0)
    finally:
        plant_port.close()
        controller_port.close()

    trace.messages = [msg for _, msg in plant_port.received] + [msg for _, msg in controller_port.received]
    return trace
