"""Quadrotor software-in-the-loop co-simulation.

A 100 Hz nonlinear 6-DOF plant and a 50 Hz hierarchical controller (LQR
attitude, PD altitude with gravity feedforward) exchanging typed messages
over either a deterministic in-process lockstep bus or a UDP transport,
plus a scenario runner with step-response analysis.
"""

__version__ = "0.1.0"

from .control import (
    AltitudeGains,
    ControllerConfig,
    ControllerNode,
    Setpoint,
    allocate_motors,
    altitude_thrust,
    attitude_moments,
    control_loop_tick,
    default_controller_config,
    fit_altitude_gains,
)
from .dynamics import (
    ControlVector,
    MotorSpeeds,
    VehicleState,
    hover_speed,
    mix_forward,
    plant_step,
    rotational_accel,
    state_derivative,
    translational_accel,
)
from .harness import emit_csv, read_csv, run_scenario
from .lockstep import lockstep_run
from .lqr import ChannelGains, LqrWeights, solve_channel_are
from .messages import TopicMessage, decode_frame, encode_frame
from .metrics import StepMetrics, step_metrics
from .nodes import PlantNode
from .params import QuadParams
from .rotation import (
    EulerAngles,
    GimbalLockError,
    Quaternion,
    euler_to_quaternion,
    quaternion_to_euler,
    rotation_enu_to_body,
)
from .scenario import ScenarioConfig, load_scenario, parse_scenario
from .trace import RunTrace
from .udp import Endpoints, udp_run

__all__ = [
    "AltitudeGains",
    "ChannelGains",
    "ControlVector",
    "ControllerConfig",
    "ControllerNode",
    "Endpoints",
    "EulerAngles",
    "GimbalLockError",
    "LqrWeights",
    "MotorSpeeds",
    "PlantNode",
    "QuadParams",
    "Quaternion",
    "RunTrace",
    "ScenarioConfig",
    "Setpoint",
    "StepMetrics",
    "TopicMessage",
    "VehicleState",
    "allocate_motors",
    "altitude_thrust",
    "attitude_moments",
    "control_loop_tick",
    "decode_frame",
    "default_controller_config",
    "emit_csv",
    "encode_frame",
    "euler_to_quaternion",
    "fit_altitude_gains",
    "hover_speed",
    "lockstep_run",
    "mix_forward",
    "parse_scenario",
    "plant_step",
    "quaternion_to_euler",
    "read_csv",
    "rotation_enu_to_body",
    "rotational_accel",
    "run_scenario",
    "solve_channel_are",
    "state_derivative",
    "step_metrics",
    "translational_accel",
    "udp_run",
    "load_scenario",
]
