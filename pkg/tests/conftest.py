import socket

from quadsim.bus import Bus
from quadsim.control import ControllerNode, default_controller_config
from quadsim.messages import IMU_TOPIC, MOTOR_COMMANDS_TOPIC, POSE_TOPIC, VELOCITY_TOPIC
from quadsim.nodes import PlantNode
from quadsim.params import QuadParams
from quadsim.udp import Endpoints


def build_lockstep(params=None, cfg=None, full_rotational=True, initial_state=None, mute_after=None):
    """Standard wiring: one bus, one plant node, one controller node."""
    params = params or QuadParams()
    cfg = cfg or default_controller_config(params)
    bus = Bus()
    bus.register_all()
    plant = PlantNode(
        params,
        bus.publisher(),
        bus.subscribe(MOTOR_COMMANDS_TOPIC),
        full_rotational=full_rotational,
        state=initial_state,
        mute_after=mute_after,
    )
    controller = ControllerNode(
        cfg,
        params,
        bus.publisher(),
        imu_sub=bus.subscribe(IMU_TOPIC),
        pose_sub=bus.subscribe(POSE_TOPIC),
        velocity_sub=bus.subscribe(VELOCITY_TOPIC),
    )
    return bus, plant, controller


def free_endpoints() -> Endpoints:
    """Endpoints on two OS-assigned free loopback ports."""
    ports = []
    for _ in range(2):
        s = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
        s.bind(("127.0.0.1", 0))
        ports.append(s.getsockname()[1])
        s.close()
    return Endpoints(plant_port=ports[0], controller_port=ports[1])
