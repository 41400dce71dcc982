"""Scenario files: flat dotted-key experiment configuration.

Format: one `key = value` per line, `#` starts a comment, blank lines are
ignored, unknown keys are rejected. An empty file describes the default
experiment: 15 s lockstep run at 100/50 Hz with the reference airframe,
full gyroscopic coupling in the plant, and an all-zero setpoint.

Recognized keys:

    duration_s, plant_rate_hz, controller_rate_hz
    transport = lockstep | udp
    rotational_model = full | simplified
    output = <csv path>
    quad.m quad.g quad.ixx quad.iyy quad.izz quad.arm_length quad.kt quad.km
    weights.<roll|pitch|yaw>.<q1|q2|r>
    gains.altitude.<kp|kd>
    gains.<roll|pitch|yaw>.<k1|k2>
    controller.staleness_budget
    controller.safety = hover | zeros
    limits.u1_max limits.omega_max
    setpoint.<N>.<t|z_des|phi_des|theta_des|psi_des>
    udp.plant_host udp.plant_port udp.controller_host udp.controller_port
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

from .control import AltitudeGains, ControllerConfig, Setpoint, default_controller_config, fit_altitude_gains
from .dynamics import MotorSpeeds, hover_speed
from .lockstep import RateConfigError, rate_ratio
from .lqr import ChannelGains, LqrWeights, solve_channel_are
from .params import QuadParams
from .udp import Endpoints

CHANNELS = ("roll", "pitch", "yaw")


class ScenarioError(ValueError):
    """Malformed scenario text; carries the offending line when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass
class ScenarioConfig:
    """One experiment: rates, duration, vehicle, gains, setpoints, transport."""

    duration_s: float = 15.0
    plant_rate_hz: float = 100.0
    controller_rate_hz: float = 50.0
    transport: str = "lockstep"
    rotational_model: str = "full"
    output_path: str | None = None
    params: QuadParams = field(default_factory=QuadParams)
    weights: dict = field(default_factory=lambda: {c: LqrWeights() for c in CHANNELS})
    gain_overrides: dict = field(default_factory=dict)
    altitude_override: AltitudeGains | None = None
    staleness_budget: float = 0.1
    safety: str = "hover"
    u1_max: float | None = None
    omega_max: float | None = None
    schedule: tuple = ((0.0, Setpoint()),)
    endpoints: Endpoints = field(default_factory=Endpoints)

    def validate(self) -> None:
        if self.duration_s <= 0.0:
            raise ScenarioError(f"duration must be positive, got {self.duration_s}")
        try:
            rate_ratio(self.plant_rate_hz, self.controller_rate_hz)
        except RateConfigError as exc:
            raise ScenarioError(str(exc)) from exc
        if self.transport not in ("lockstep", "udp"):
            raise ScenarioError(f"transport must be lockstep or udp, got {self.transport!r}")
        if self.rotational_model not in ("full", "simplified"):
            raise ScenarioError(f"rotational_model must be full or simplified, got {self.rotational_model!r}")
        if self.safety not in ("hover", "zeros"):
            raise ScenarioError(f"controller.safety must be hover or zeros, got {self.safety!r}")

    @property
    def full_rotational(self) -> bool:
        return self.rotational_model == "full"

    def safety_command(self) -> MotorSpeeds:
        if self.safety == "zeros":
            return MotorSpeeds(0.0, 0.0, 0.0, 0.0)
        wh = hover_speed(self.params)
        return MotorSpeeds(wh, wh, wh, wh)

    def controller_config(self) -> ControllerConfig:
        """Synthesize the controller configuration for this scenario."""
        altitude = self.altitude_override or fit_altitude_gains(0.18, 2.5, self.params)
        inertias = {"roll": self.params.ixx, "pitch": self.params.iyy, "yaw": self.params.izz}
        channel = {
            name: self.gain_overrides.get(name) or solve_channel_are(inertias[name], self.weights[name])
            for name in CHANNELS
        }
        return ControllerConfig(
            altitude=altitude,
            roll=channel["roll"],
            pitch=channel["pitch"],
            yaw=channel["yaw"],
            safety_command=self.safety_command(),
            rate_hz=self.controller_rate_hz,
            staleness_budget=self.staleness_budget,
            schedule=self.schedule,
            u1_max=self.u1_max,
            omega_max=self.omega_max,
        )


def _parse_float(text: str) -> float:
    return float(text)


def _parse_int(text: str) -> int:
    return int(text, 10)


_TOP_KEYS = {
    "duration_s": ("duration_s", _parse_float),
    "plant_rate_hz": ("plant_rate_hz", _parse_float),
    "controller_rate_hz": ("controller_rate_hz", _parse_float),
    "output": ("output_path", str),
    "controller.staleness_budget": ("staleness_budget", _parse_float),
    "limits.u1_max": ("u1_max", _parse_float),
    "limits.omega_max": ("omega_max", _parse_float),
    "udp.plant_host": (("endpoints", "plant_host"), str),
    "udp.plant_port": (("endpoints", "plant_port"), _parse_int),
    "udp.controller_host": (("endpoints", "controller_host"), str),
    "udp.controller_port": (("endpoints", "controller_port"), _parse_int),
}

_ENUM_KEYS = {
    "transport": ("transport", ("lockstep", "udp")),
    "rotational_model": ("rotational_model", ("full", "simplified")),
    "controller.safety": ("safety", ("hover", "zeros")),
}

_QUAD_FIELDS = ("m", "g", "ixx", "iyy", "izz", "arm_length", "kt", "km")
_SETPOINT_FIELDS = ("t", "z_des", "phi_des", "theta_des", "psi_des")


def parse_scenario(text: str) -> ScenarioConfig:
    """Parse scenario text into a validated ScenarioConfig."""
    cfg = ScenarioConfig()
    quad_over: dict[str, float] = {}
    weight_over: dict[str, dict[str, float]] = {}
    gain_over: dict[str, dict[str, float]] = {}
    setpoints: dict[int, dict[str, float]] = {}
    setpoint_lines: dict[int, int] = {}
    rate_line: int | None = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ScenarioError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, _, value = (part.strip() for part in line.partition("="))
        if not key or not value:
            raise ScenarioError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        try:
            _apply_key(cfg, key, value, quad_over, weight_over, gain_over, setpoints, setpoint_lines, lineno)
        except ScenarioError:
            raise
        except ValueError as exc:
            raise ScenarioError(f"bad value for {key!r}: {exc}", lineno) from exc
        if key in ("plant_rate_hz", "controller_rate_hz"):
            rate_line = lineno

    if quad_over:
        try:
            cfg.params = dataclasses.replace(QuadParams(), **quad_over)
        except ValueError as exc:
            raise ScenarioError(str(exc)) from exc
    for name, fields_ in weight_over.items():
        cfg.weights[name] = dataclasses.replace(LqrWeights(), **fields_)
    if "altitude" in gain_over:
        f = gain_over.pop("altitude")
        if set(f) != {"kp", "kd"}:
            raise ScenarioError("gains.altitude needs both kp and kd")
        cfg.altitude_override = AltitudeGains(**f)
    for name, f in gain_over.items():
        if set(f) != {"k1", "k2"}:
            raise ScenarioError(f"gains.{name} needs both k1 and k2")
        cfg.gain_overrides[name] = ChannelGains(**f)
    if setpoints:
        schedule = []
        for idx in sorted(setpoints):
            f = dict(setpoints[idx])
            t_apply = f.pop("t", 0.0)
            try:
                schedule.append((t_apply, Setpoint(**f)))
            except ValueError as exc:
                raise ScenarioError(f"setpoint.{idx}: {exc}", setpoint_lines[idx]) from exc
        cfg.schedule = tuple(schedule)

    try:
        cfg.validate()
    except ScenarioError as exc:
        if exc.line is None and rate_line is not None and "rate" in str(exc):
            raise ScenarioError(str(exc), rate_line) from exc
        raise
    return cfg


def _apply_key(cfg, key, value, quad_over, weight_over, gain_over, setpoints, setpoint_lines, lineno):
    if key in _TOP_KEYS:
        target, conv = _TOP_KEYS[key]
        parsed = conv(value)
        if isinstance(target, tuple):
            attr, sub = target
            setattr(cfg, attr, dataclasses.replace(getattr(cfg, attr), **{sub: parsed}))
        else:
            setattr(cfg, target, parsed)
        return
    if key in _ENUM_KEYS:
        attr, allowed = _ENUM_KEYS[key]
        if value not in allowed:
            raise ScenarioError(f"{key} must be one of {'|'.join(allowed)}, got {value!r}", lineno)
        setattr(cfg, attr, value)
        return
    parts = key.split(".")
    if parts[0] == "quad" and len(parts) == 2 and parts[1] in _QUAD_FIELDS:
        quad_over[parts[1]] = _parse_float(value)
        return
    if parts[0] == "weights" and len(parts) == 3 and parts[1] in CHANNELS and parts[2] in ("q1", "q2", "r"):
        weight_over.setdefault(parts[1], {})[parts[2]] = _parse_float(value)
        return
    if parts[0] == "gains" and len(parts) == 3:
        if parts[1] == "altitude" and parts[2] in ("kp", "kd"):
            gain_over.setdefault("altitude", {})[parts[2]] = _parse_float(value)
            return
        if parts[1] in CHANNELS and parts[2] in ("k1", "k2"):
            gain_over.setdefault(parts[1], {})[parts[2]] = _parse_float(value)
            return
    if parts[0] == "setpoint" and len(parts) == 3 and parts[2] in _SETPOINT_FIELDS:
        try:
            idx = int(parts[1], 10)
        except ValueError:
            raise ScenarioError(f"setpoint index must be an integer, got {parts[1]!r}", lineno) from None
        setpoints.setdefault(idx, {})[parts[2]] = _parse_float(value)
        setpoint_lines.setdefault(idx, lineno)
        return
    raise ScenarioError(f"unknown key {key!r}", lineno)


def load_scenario(path: str) -> ScenarioConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_scenario(fh.read())
