"""Discrete PD control law, continuous design check, reference generator."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from ._kernels import GAIN

DERIVATIVE_MODES = ("error", "measurement")


@dataclass(frozen=True)
class ControllerParams:
    kp: float = 1.5
    kd: float = 0.054
    ki: float = 0.0
    h: float = 0.01
    # "error" is the law exactly as printed; "measurement" differentiates -y
    # instead, which removes the derivative kick on reference steps.
    derivative_on: str = "error"

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError(f"sampling period h must be positive, got {self.h}")
        if self.derivative_on not in DERIVATIVE_MODES:
            raise ValueError(f"derivative_on must be one of {DERIVATIVE_MODES}, got {self.derivative_on!r}")


@dataclass(frozen=True)
class ControllerState:
    params: ControllerParams = field(default_factory=ControllerParams)
    e_prev: float = 0.0
    i_prev: float = 0.0
    y_prev: float = 0.0


def control_step(state: ControllerState, r: float, y: float) -> tuple[float, ControllerState]:
    """One execution of the PD(+I) law. Pure: returns ``(u, new_state)``.

    e = r - y
    i = i_prev + ki*h/2 * (e - e_prev)
    d = kd/h * (e - e_prev)
    u = kp*e + i + d
    """
    p = state.params
    e = r - y
    de = e - state.e_prev
    i = state.i_prev + (p.ki * p.h / 2.0) * de
    if p.derivative_on == "error":
        d = (p.kd / p.h) * de
    else:
        d = -(p.kd / p.h) * (y - state.y_prev)
    u = p.kp * e + i + d
    return u, replace(state, e_prev=e, i_prev=i, y_prev=y)


@dataclass(frozen=True)
class DesignCheck:
    zeta: float
    overshoot_pct: float
    overdamped: bool


def design_check(params: ControllerParams) -> DesignCheck:
    """Damping ratio and predicted overshoot of the continuous PD design.

    Closed-loop characteristic polynomial of kp + kd*s around the servo:
    s^2 + (1 + 1000 kd) s + 1000 kp.
    """
    if not params.kp > 0:
        raise ValueError("design_check needs kp > 0")
    wn = math.sqrt(GAIN * params.kp)
    zeta = (1.0 + GAIN * params.kd) / (2.0 * wn)
    if zeta >= 1.0:
        return DesignCheck(zeta, 0.0, True)
    return DesignCheck(zeta, 100.0 * math.exp(-math.pi * zeta / math.sqrt(1.0 - zeta * zeta)), False)


@dataclass(frozen=True)
class ReferenceConfig:
    amplitude: float = 1.0
    period: float = 1.0
    shape: str = "square"

    def __post_init__(self):
        if not self.period > 0:
            raise ValueError(f"reference period must be positive, got {self.period}")
        if self.shape != "square":
            raise ValueError(f"unsupported reference shape {self.shape!r}")


def reference(t: float, cfg: ReferenceConfig) -> float:
    """Square wave: +amplitude on [0, T/2), -amplitude on [T/2, T), repeating."""
    if t < 0:
        raise ValueError("t must be non-negative")
    phase = math.fmod(t, cfg.period)
    return cfg.amplitude if phase < 0.5 * cfg.period else -cfg.amplitude


def reference_ticks(ticks: int, amplitude: float, period_ticks: int) -> float:
    """Integer-time variant used inside runs, free of floating phase error."""
    return amplitude if (ticks % period_ticks) * 2 < period_ticks else -amplitude
