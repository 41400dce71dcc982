"""Per-channel LQR synthesis for the attitude loops.

Each attitude channel is the double integrator I * angle_ddot = moment,
written in (tracking error, rate) coordinates. The continuous-time
algebraic Riccati equation for that system has an exact closed-form
solution, which serves as the fallback and as the oracle for the numeric
solver. Gains are returned in the convention the controller executes:

    moment = k1 * error - k2 * rate,  k1 > 0, k2 > 0
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg


@dataclass(frozen=True)
class LqrWeights:
    """Quadratic cost weights: q1 on error, q2 on rate, r on the moment."""

    q1: float = 1.0
    q2: float = 1.0
    r: float = 1.0

    def __post_init__(self) -> None:
        if not (self.q1 > 0.0 and self.q2 >= 0.0 and self.r > 0.0):
            raise ValueError(f"need q1 > 0, q2 >= 0, r > 0, got {self}")


@dataclass(frozen=True)
class ChannelGains:
    """Error and rate feedback gains of one attitude channel."""

    k1: float
    k2: float

    def __post_init__(self) -> None:
        if not (self.k1 > 0.0 and self.k2 > 0.0):
            raise ValueError(f"channel gains must be positive, got {self}")


def channel_system(inertia: float) -> tuple[np.ndarray, np.ndarray]:
    """State-space matrices of one channel in (error, rate) coordinates."""
    a = np.array([[0.0, -1.0], [0.0, 0.0]])
    b = np.array([[0.0], [1.0 / inertia]])
    return a, b


def closed_form_gains(inertia: float, w: LqrWeights) -> ChannelGains:
    """Exact ARE solution for the double-integrator channel."""
    k1 = math.sqrt(w.q1 / w.r)
    k2 = math.sqrt(w.q2 / w.r + 2.0 * inertia * k1)
    return ChannelGains(k1, k2)


def care_solution_from_gains(inertia: float, w: LqrWeights, gains: ChannelGains) -> np.ndarray:
    """Riccati solution matrix P implied by gains in the executed convention."""
    p12 = -gains.k1 * w.r * inertia
    p22 = gains.k2 * w.r * inertia
    p11 = gains.k1 * gains.k2 * w.r
    return np.array([[p11, p12], [p12, p22]])


def riccati_residual(inertia: float, w: LqrWeights, gains: ChannelGains) -> float:
    """Max-norm residual of A'P + PA - P B R^-1 B' P + Q for the channel."""
    a, b = channel_system(inertia)
    q = np.diag([w.q1, w.q2])
    p = care_solution_from_gains(inertia, w, gains)
    residual = a.T @ p + p @ a - p @ b @ b.T @ p / w.r + q
    return float(np.abs(residual).max())


RESIDUAL_TOL = 1e-9


def solve_channel_are(inertia: float, w: LqrWeights) -> ChannelGains:
    """LQR gains for one attitude channel.

    Solves the continuous-time ARE numerically and converts the optimal
    state feedback into the executed sign convention. Falls back to the
    exact closed form if the numeric solve fails or its residual is out of
    tolerance.
    """
    if inertia <= 0.0:
        raise ValueError(f"inertia must be positive, got {inertia}")
    a, b = channel_system(inertia)
    q = np.diag([w.q1, w.q2])
    r = np.array([[w.r]])
    try:
        p = linalg.solve_continuous_are(a, b, q, r)
        k = (b.T @ p / w.r)[0]  # u = -k x
        gains = ChannelGains(float(-k[0]), float(k[1]))
    except (linalg.LinAlgError, ValueError):
        return closed_form_gains(inertia, w)
    if riccati_residual(inertia, w, gains) > RESIDUAL_TOL:
        return closed_form_gains(inertia, w)
    return gains


def closed_loop_matrix(inertia: float, gains: ChannelGains) -> np.ndarray:
    """Closed-loop system matrix in (angle, rate) coordinates."""
    return np.array([[0.0, 1.0], [-gains.k1 / inertia, -gains.k2 / inertia]])
