"""Recorded results of one closed-loop run, shared by both transports."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dynamics import MotorSpeeds, VehicleState
from .messages import TopicMessage

STATE_COLUMNS = ("x", "y", "z", "vx", "vy", "vz", "phi", "theta", "psi", "p", "q", "r")


@dataclass
class RunTrace:
    """Per-tick states, controller commands, and the message log of a run.

    `times`/`states` hold one entry per plant tick including the initial
    condition; `command_times`/`commands` hold one entry per controller
    tick. A fault that terminated the run early is recorded with its time;
    the partial trace up to that point remains valid.
    """

    times: list[float] = field(default_factory=list)
    states: list[VehicleState] = field(default_factory=list)
    command_times: list[float] = field(default_factory=list)
    commands: list[MotorSpeeds] = field(default_factory=list)
    messages: list[TopicMessage] = field(default_factory=list)
    fault: str | None = None
    fault_time: float | None = None

    def time_array(self) -> np.ndarray:
        return np.array(self.times)

    def column(self, name: str) -> np.ndarray:
        """Time series of one state component, by CSV column name."""
        try:
            idx = STATE_COLUMNS.index(name)
        except ValueError:
            raise KeyError(f"unknown state column {name!r}; expected one of {STATE_COLUMNS}") from None
        return np.array([s.as_vector()[idx] for s in self.states])

    def command_matrix_zoh(self) -> np.ndarray:
        """Per-state-row motor speeds: newest command at or before each row time."""
        out = np.zeros((len(self.times), 4))
        j = -1
        for i, t in enumerate(self.times):
            while j + 1 < len(self.command_times) and self.command_times[j + 1] <= t:
                j += 1
            if j >= 0:
                out[i] = self.commands[j].as_array()
        return out
