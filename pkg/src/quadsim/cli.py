"""Command-line interface.

    quadsim run <scenario-file> [--out CSV] [--transport lockstep|udp] [--metrics SIGNAL]
    quadsim gains --channel roll|pitch|yaw|altitude
    quadsim codec-selftest
"""

from __future__ import annotations

import argparse
import math
import sys

from . import __version__
from .control import active_setpoint, fit_altitude_gains
from .harness import run_scenario
from .lqr import LqrWeights, solve_channel_are
from .messages import (
    HEADER_SIZE,
    IMU_TOPIC,
    MOTOR_COMMANDS_TOPIC,
    POSE_TOPIC,
    VELOCITY_TOPIC,
    ImuPayload,
    MotorCommandPayload,
    PosePayload,
    TopicMessage,
    TwistPayload,
    decode_frame,
    encode_frame,
)
from .metrics import step_metrics
from .params import QuadParams
from .rotation import Quaternion
from .scenario import ScenarioError, load_scenario
from .udp import TransportError

_METRIC_SETPOINT_FIELDS = {"z": "z_des", "phi": "phi_des", "theta": "theta_des", "psi": "psi_des"}


def _print_aligned(pairs) -> None:
    width = max(len(name) for name, _ in pairs)
    for name, value in pairs:
        print(f"{name:<{width}} : {value:.6g}" if isinstance(value, float) else f"{name:<{width}} : {value}")


def _cmd_run(args) -> int:
    try:
        cfg = load_scenario(args.scenario)
    except (OSError, ScenarioError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.out:
        cfg.output_path = args.out
    if args.transport:
        cfg.transport = args.transport
    try:
        trace = run_scenario(cfg)
    except (ScenarioError, TransportError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if trace.fault is not None:
        print(f"fault at t={trace.fault_time}: {trace.fault}", file=sys.stderr)
        return 1
    print(f"ran {cfg.duration_s} s on {cfg.transport}: {len(trace.states)} state rows, {len(trace.commands)} commands")
    if cfg.output_path:
        print(f"wrote {cfg.output_path}")
    if args.metrics:
        signal = args.metrics
        if signal not in _METRIC_SETPOINT_FIELDS:
            print(f"error: --metrics must be one of {sorted(_METRIC_SETPOINT_FIELDS)}", file=sys.stderr)
            return 2
        final_sp = active_setpoint(cfg.schedule, math.inf)
        setpoint = getattr(final_sp, _METRIC_SETPOINT_FIELDS[signal])
        y = trace.column(signal)
        m = step_metrics(trace.time_array(), y, setpoint, float(y[0]))
        _print_aligned(list(m.as_dict().items()))
    return 0


def _cmd_gains(args) -> int:
    p = QuadParams()
    if args.channel == "altitude":
        g = fit_altitude_gains(0.18, 2.5, p)
        _print_aligned([("kp", g.kp), ("kd", g.kd)])
        return 0
    inertia = {"roll": p.ixx, "pitch": p.iyy, "yaw": p.izz}[args.channel]
    g = solve_channel_are(inertia, LqrWeights(1.0, 1.0, 1.0))
    _print_aligned([("k1", g.k1), ("k2", g.k2)])
    return 0


def _cmd_codec_selftest(_args) -> int:
    q = Quaternion(1.0, 0.0, 0.0, 0.0)
    vectors = [
        TopicMessage(MOTOR_COMMANDS_TOPIC, 0, 0, MotorCommandPayload((0.0, 0.0, 0.0, 0.0))),
        TopicMessage(POSE_TOPIC, 3, 120_000_000, PosePayload((1.0, -2.0, 3.5), q)),
        TopicMessage(VELOCITY_TOPIC, 7, 40_000_000, TwistPayload((0.1, 0.2, -0.3), (0.0, 0.01, 0.02))),
        TopicMessage(IMU_TOPIC, 11, 990_000_000, ImuPayload(q, (0.5, -0.5, 0.25))),
    ]
    failures = 0
    for msg in vectors:
        frame = encode_frame(msg)
        back = decode_frame(frame)
        ok = back == msg
        failures += 0 if ok else 1
        print(
            f"{msg.topic:<24} frame {len(frame):>3} B (payload {len(frame) - HEADER_SIZE} B)  "
            f"{'ok' if ok else 'MISMATCH'}"
        )
    return 1 if failures else 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="quadsim", description="Quadrotor co-simulation runner")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute a scenario file")
    run_p.add_argument("scenario")
    run_p.add_argument("--out", help="CSV output path (overrides the scenario's `output`)")
    run_p.add_argument("--transport", choices=("lockstep", "udp"))
    run_p.add_argument("--metrics", metavar="SIGNAL", help="print step metrics for z|phi|theta|psi")
    run_p.set_defaults(func=_cmd_run)

    gains_p = sub.add_parser("gains", help="print synthesized gains for one channel")
    gains_p.add_argument("--channel", required=True, choices=("roll", "pitch", "yaw", "altitude"))
    gains_p.set_defaults(func=_cmd_gains)

    codec_p = sub.add_parser("codec-selftest", help="run wire-format round-trip vectors")
    codec_p.set_defaults(func=_cmd_codec_selftest)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
