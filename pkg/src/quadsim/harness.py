"""Experiment runner: wires nodes to a transport, records, and exports.

CSV layout: header `t,x,y,z,vx,vy,vz,phi,theta,psi,p,q,r,w1,w2,w3,w4`, one
row per plant tick including the initial condition. Motor columns carry
the newest controller command at or before the row time (zero-order
hold). Floats are printed with 17 significant digits so a reload
reproduces every value bit-exactly.
"""

from __future__ import annotations

import numpy as np

from .bus import Bus
from .control import ControllerNode
from .lockstep import lockstep_run
from .messages import IMU_TOPIC, MOTOR_COMMANDS_TOPIC, POSE_TOPIC, VELOCITY_TOPIC
from .nodes import PlantNode
from .scenario import ScenarioConfig
from .trace import STATE_COLUMNS, RunTrace
from .udp import udp_run

CSV_HEADER = "t," + ",".join(STATE_COLUMNS) + ",w1,w2,w3,w4"


def run_scenario(cfg: ScenarioConfig) -> RunTrace:
    """Execute one scenario on its configured transport.

    Faults that kill the run mid-flight are recorded in the returned
    trace; whatever rows were produced are still written to the output
    path when one is configured.
    """
    cfg.validate()
    controller_cfg = cfg.controller_config()
    if cfg.transport == "udp":
        trace = udp_run(
            cfg.params,
            controller_cfg,
            cfg.endpoints,
            cfg.duration_s,
            plant_rate_hz=cfg.plant_rate_hz,
            controller_rate_hz=cfg.controller_rate_hz,
            full_rotational=cfg.full_rotational,
        )
    else:
        bus = Bus()
        bus.register_all()
        plant = PlantNode(
            cfg.params,
            bus.publisher(),
            bus.subscribe(MOTOR_COMMANDS_TOPIC),
            full_rotational=cfg.full_rotational,
        )
        controller = ControllerNode(
            controller_cfg,
            cfg.params,
            bus.publisher(),
            imu_sub=bus.subscribe(IMU_TOPIC),
            pose_sub=bus.subscribe(POSE_TOPIC),
            velocity_sub=bus.subscribe(VELOCITY_TOPIC),
        )
        trace = lockstep_run(
            bus, plant, controller, cfg.duration_s, cfg.plant_rate_hz, cfg.controller_rate_hz
        )
    if cfg.output_path and trace.states:
        emit_csv(trace, cfg.output_path)
    return trace


def emit_csv(trace: RunTrace, path: str) -> None:
    """Write the trace to CSV; refuses an empty trace (no file is created)."""
    if not trace.states:
        raise ValueError("trace is empty; nothing to write")
    motors = trace.command_matrix_zoh()
    lines = [CSV_HEADER]
    for i, (t, state) in enumerate(zip(trace.times, trace.states)):
        row = [t, *state.as_vector(), *motors[i]]
        lines.append(",".join(f"{v:.17g}" for v in row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_csv(path: str) -> dict[str, np.ndarray]:
    """Load an emitted CSV back into named columns."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        data = np.array([[float(v) for v in line.split(",")] for line in fh if line.strip()])
    if data.size == 0:
        raise ValueError(f"{path} contains no data rows")
    return {name: data[:, i] for i, name in enumerate(header)}
