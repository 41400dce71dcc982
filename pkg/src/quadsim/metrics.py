"""Step-response analysis of recorded time series."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SETTLING_BAND = 0.02  # fraction of the step span
FINAL_WINDOW_S = 1.0  # averaging window for the steady-state error


class UndefinedSpanError(ValueError):
    """Setpoint equals the initial value; step metrics are undefined."""


@dataclass(frozen=True)
class StepMetrics:
    """Transient figures of one step response.

    Times are measured from the first trace sample, so metrics are
    invariant under a uniform time shift. Crossing times are linearly
    interpolated between samples; settling uses a +/-2% band of the step
    span; quantities that never occur are +inf.
    """

    peak_value: float
    peak_time_s: float
    overshoot_pct: float
    settling_time_s: float
    rise_time_s: float
    rise95_time_s: float
    steady_state_error: float

    def as_dict(self) -> dict[str, float]:
        return {
            "peak_value": self.peak_value,
            "peak_time_s": self.peak_time_s,
            "overshoot_pct": self.overshoot_pct,
            "settling_time_s": self.settling_time_s,
            "rise_time_s": self.rise_time_s,
            "rise95_time_s": self.rise95_time_s,
            "steady_state_error": self.steady_state_error,
        }


def _first_crossing(t: np.ndarray, y: np.ndarray, level: float, direction: float) -> float:
    """Time of the first crossing of `level` in the step direction."""
    reached = np.nonzero(direction * y >= direction * level)[0]
    if len(reached) == 0:
        return math.inf
    i = int(reached[0])
    if i == 0:
        return float(t[0])
    frac = (level - y[i - 1]) / (y[i] - y[i - 1])
    return float(t[i - 1] + frac * (t[i] - t[i - 1]))


def step_metrics(t, y, setpoint: float, initial: float) -> StepMetrics:
    """Analyze one step from `initial` to `setpoint` over samples (t, y).

    Raises UndefinedSpanError when setpoint == initial.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if t.shape != y.shape or t.ndim != 1 or len(t) < 2:
        raise ValueError("need matching 1-D time and signal arrays with at least two samples")
    span = setpoint - initial
    if span == 0.0:
        raise UndefinedSpanError("setpoint equals the initial value; the step span is zero")
    direction = 1.0 if span > 0 else -1.0
    t0 = float(t[0])

    peak_idx = int(np.argmax(direction * y))
    peak_value = float(y[peak_idx])
    peak_time = float(t[peak_idx]) - t0
    overshoot = max(0.0, 100.0 * (peak_value - setpoint) / span)

    band = SETTLING_BAND * abs(span)
    outside = np.nonzero(np.abs(y - setpoint) > band)[0]
    if len(outside) == 0:
        settling = 0.0
    elif outside[-1] == len(y) - 1:
        settling = math.inf
    else:
        settling = float(t[outside[-1] + 1]) - t0

    t10 = _first_crossing(t, y, initial + 0.10 * span, direction)
    t90 = _first_crossing(t, y, initial + 0.90 * span, direction)
    rise = t90 - t10 if math.isfinite(t90) and math.isfinite(t10) else math.inf
    t95 = _first_crossing(t, y, initial + 0.95 * span, direction)
    rise95 = t95 - t0 if math.isfinite(t95) else math.inf

    window = t >= t[-1] - FINAL_WINDOW_S
    sse = abs(setpoint - float(np.mean(y[window])))

    return StepMetrics(
        peak_value=peak_value,
        peak_time_s=peak_time,
        overshoot_pct=overshoot,
        settling_time_s=settling,
        rise_time_s=rise,
        rise95_time_s=rise95,
        steady_state_error=sse,
    )
