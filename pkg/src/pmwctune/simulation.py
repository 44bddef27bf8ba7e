"""Closed-loop unit-step simulation and the IAE performance index."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .lti import (
    PidGains,
    StateSpace,
    TransferFunction,
    feedback_unity,
    pid_tf,
    series,
    to_state_space,
)

__all__ = [
    "SimGrid",
    "StepResponse",
    "StepMetrics",
    "step_response",
    "iae",
    "closed_loop",
    "iae_of_gains",
    "step_metrics",
]

# Anything past this magnitude is treated as a diverging response.
DIVERGENCE_LIMIT = 1e150


@dataclass(frozen=True)
class SimGrid:
    """Uniform time grid ``0, dt, ..., t_end``."""

    t_end: float = 20.0
    dt: float = 0.01

    def __post_init__(self):
        if not (self.t_end > 0 and self.dt > 0):
            raise ValueError("t_end and dt must be positive")
        ratio = self.t_end / self.dt
        if abs(ratio - round(ratio)) > 1e-9 * max(1.0, ratio):
            raise ValueError("t_end must be an integer multiple of dt")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.n_steps + 1) * self.dt


@dataclass(frozen=True)
class StepResponse:
    t: np.ndarray
    y: np.ndarray

    @property
    def error(self) -> np.ndarray:
        return 1.0 - self.y


@dataclass(frozen=True)
class StepMetrics:
    settling_time: float
    overshoot_pct: float
    final_value: float


def _zoh(ss: StateSpace, dt: float) -> tuple[np.ndarray, np.ndarray]:
    n = ss.order
    aug = np.zeros((n + 1, n + 1))
    aug[:n, :n] = ss.A
    aug[:n, n:] = ss.B
    phi = expm(aug * dt)
    return phi[:n, :n], phi[:n, n]


def step_response(ss: StateSpace, grid: SimGrid = SimGrid()) -> StepResponse:
    """Unit-step response, exact at the grid points (zero-order hold).

    Samples past ``DIVERGENCE_LIMIT`` stop the recursion and the remaining
    outputs are set to ``inf``.
    """
    t = grid.times
    d = float(ss.D[0, 0])
    if ss.order == 0:
        return StepResponse(t, np.full(t.size, d))
    ad, bd = _zoh(ss, grid.dt)
    c = ss.C[0]
    y = np.empty(t.size)
    x = np.zeros(ss.order)
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(t.size):
            yk = c @ x + d
            if not abs(yk) < DIVERGENCE_LIMIT:
                y[k:] = np.inf
                break
            y[k] = yk
            x = ad @ x + bd
    return StepResponse(t, y)


def iae(resp: StepResponse) -> float:
    """Trapezoidal integral of ``|1 - y|``; ``inf`` for non-finite samples."""
    if resp.y.size == 0:
        raise ValueError("empty response")
    if not np.all(np.isfinite(resp.y)):
        return math.inf
    value = float(np.trapezoid(np.abs(resp.error), resp.t))
    return value if math.isfinite(value) else math.inf


def closed_loop(g: PidGains, plant: TransferFunction) -> TransferFunction:
    return feedback_unity(series(pid_tf(g), plant))


def iae_of_gains(g: PidGains, plant: TransferFunction, grid: SimGrid = SimGrid()) -> float:
    """IAE of the PID-over-plant unity-feedback step response.

    Returns ``inf`` instead of raising when the closed loop cannot be
    realized or diverges, so optimizers see a total function.
    """
    try:
        ss = to_state_space(closed_loop(g, plant))
    except ValueError:
        return math.inf
    return iae(step_response(ss, grid))


def step_metrics(resp: StepResponse, band: float = 0.02, final_value: float | None = None) -> StepMetrics:
    """Settling time and percent overshoot of a step response.

    Settling time is the last instant the response is outside
    ``final_value * (1 +/- band)``, linearly interpolated between samples.
    ``final_value`` defaults to the last sample.
    """
    y, t = resp.y, resp.t
    yf = float(y[-1]) if final_value is None else float(final_value)
    if not np.all(np.isfinite(y)) or yf == 0:
        return StepMetrics(math.inf, math.inf, yf)
    tol = band * abs(yf)
    dev = np.abs(y - yf)
    outside = np.flatnonzero(dev > tol)
    if outside.size == 0:
        ts = 0.0
    elif outside[-1] == y.size - 1:
        ts = math.inf
    else:
        k = outside[-1]
        # crossing of the band edge between samples k and k+1
        frac = (dev[k] - tol) / (dev[k] - dev[k + 1])
        ts = float(t[k] + frac * (t[k + 1] - t[k]))
    overshoot = max(0.0, (float(np.max(y)) - yf) / abs(yf) * 100.0)
    return StepMetrics(ts, overshoot, yf)
