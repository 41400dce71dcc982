"""Dual-rate deterministic co-simulation on a shared virtual clock.

Each 1/plant_rate tick runs, in order: plant publishes its current state;
the controller ticks if the instant lies on its grid (so it always sees
the publications of the same instant); the plant integrates to the next
tick using the newest command. Runs are pure functions of their inputs:
identical configurations give identical traces and message logs.
"""

from __future__ import annotations

from .bus import Bus
from .control import ControllerNode
from .dynamics import NonFiniteStateError
from .nodes import PlantNode
from .rotation import GimbalLockError
from .trace import RunTrace


class RateConfigError(ValueError):
    """Plant rate is not a positive integer multiple of the controller rate."""


def rate_ratio(plant_rate_hz: float, controller_rate_hz: float) -> int:
    """Plant ticks per controller tick; faults unless a positive integer."""
    if plant_rate_hz <= 0.0 or controller_rate_hz <= 0.0:
        raise RateConfigError(f"rates must be positive, got {plant_rate_hz}/{controller_rate_hz} Hz")
    ratio = plant_rate_hz / controller_rate_hz
    if abs(ratio - round(ratio)) > 1e-9 or round(ratio) < 1:
        raise RateConfigError(
            f"plant rate {plant_rate_hz} Hz is not an integer multiple of controller rate {controller_rate_hz} Hz"
        )
    return int(round(ratio))


def lockstep_run(
    bus: Bus,
    plant: PlantNode,
    controller: ControllerNode,
    duration_s: float,
    plant_rate_hz: float = 100.0,
    controller_rate_hz: float = 50.0,
) -> RunTrace:
    """Run both nodes in lockstep for duration_s of virtual time.

    A run of duration zero performs no ticks and returns an empty trace.
    Gimbal-lock and non-finite-state faults stop the run and are recorded
    in the trace together with their time of occurrence.
    """
    ratio = rate_ratio(plant_rate_hz, controller_rate_hz)
    if duration_s < 0.0:
        raise ValueError(f"duration must be non-negative, got {duration_s}")
    n_steps = int(round(duration_s * plant_rate_hz))
    dt = 1.0 / plant_rate_hz

    trace = RunTrace(messages=bus.journal)
    if n_steps == 0:
        return trace
    trace.times.append(plant.state.t)
    trace.states.append(plant.state)

    for k in range(n_steps):
        t = k / plant_rate_hz
        bus.now = t
        try:
            plant.publish_state(t)
            if k % ratio == 0:
                trace.command_times.append(t)
                trace.commands.append(controller.tick(t))
            plant.step(dt)
        except (GimbalLockError, NonFiniteStateError) as exc:
            trace.fault = f"{type(exc).__name__}: {exc}"
            trace.fault_time = t
            return trace
        plant.state.t = (k + 1) / plant_rate_hz  # keep timestamps on the exact grid
        trace.times.append(plant.state.t)
        trace.states.append(plant.state)
    return trace
