"""DC servo G(s) = 1000 / (s (1 + s)) with zero-order-hold input.

State-space realization: x1' = x2, x2' = -x2 + 1000 u, y = x1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import _kernels
from ._kernels import GAIN


class NumericBlowup(ArithmeticError):
    """The plant state became non-finite."""


@dataclass
class PlantState:
    x1: float = 0.0
    x2: float = 0.0
    u_held: float = 0.0


@dataclass(frozen=True)
class IntegrationConfig:
    max_step: float = 100e-6

    def __post_init__(self):
        if not self.max_step > 0:
            raise ValueError(f"max_step must be positive, got {self.max_step}")


def derivative(state: PlantState, u: float) -> tuple[float, float]:
    return state.x2, -state.x2 + GAIN * u


def integrate(state: PlantState, u: float, dt: float, cfg: IntegrationConfig = IntegrationConfig()) -> PlantState:
    """Classical RK4 advance over ``dt`` seconds with ``u`` held constant.

    The interval is split into the fewest equal sub-steps not exceeding
    ``cfg.max_step``.
    """
    if dt < 0:
        raise ValueError(f"dt must be non-negative, got {dt}")
    x1, x2 = _kernels.rk4_advance(state.x1, state.x2, float(u), float(dt), cfg.max_step)
    if not (math.isfinite(x1) and math.isfinite(x2)):
        raise NumericBlowup(f"plant state diverged to ({x1}, {x2})")
    return PlantState(x1, x2, float(u))


def sample_output(state: PlantState) -> float:
    return state.x1


def analytic_step_response(t: float) -> float:
    """Exact open-loop response of the servo to a unit step applied at t=0."""
    if t < 0:
        raise ValueError("t must be non-negative")
    if t >= 1.0:
        return GAIN * (t + math.expm1(-t))
    # t - 1 + e^-t = sum_{k>=2} (-t)^k / k!, summed directly to avoid cancellation
    term = t * t / 2.0
    total = 0.0
    k = 2
    while abs(term) > 1e-17 * abs(total) or total == 0.0:
        total += term
        k += 1
        term *= -t / k
        if term == 0.0:
            break
    return GAIN * total


class Plant:
    """The servo as an entity inside a run: tracks the time it was last advanced."""

    def __init__(self, cfg: IntegrationConfig = IntegrationConfig()):
        self.cfg = cfg
        self.state = PlantState()
        self.t_last = 0

    def advance_to(self, ticks: int) -> PlantState:
        """Integrate up to simulated time ``ticks`` (integer nanoseconds)."""
        if ticks > self.t_last:
            s = self.state
            dt = (ticks - self.t_last) * 1e-9
            s.x1, s.x2 = _kernels.rk4_advance(s.x1, s.x2, s.u_held, dt, self.cfg.max_step)
            self.t_last = ticks
        return self.state

    def apply(self, u: float) -> None:
        self.state.u_held = float(u)

    @property
    def finite(self) -> bool:
        return math.isfinite(self.state.x1) and math.isfinite(self.state.x2)
