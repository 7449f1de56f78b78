"""Trace-level performance measures."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..frames import ACTUATION, SENSOR
from ..kernel import NS_PER_S

DIRECTIONS = {SENSOR: "sensor_to_controller", ACTUATION: "controller_to_actuator"}


class NoStepError(ValueError):
    """The reference never changes, so overshoot is undefined."""


@dataclass(frozen=True)
class DelayStats:
    mean: float
    max: float
    min: float
    jitter: float
    count: int


def reference_steps(trace) -> list[tuple[int, int, float, float]]:
    """``(start_row, end_row, from_value, to_value)`` for every reference change.

    The plant starts at rest at 0, so a non-zero initial reference counts as
    a step from 0.
    """
    r = np.asarray(trace.reference)
    if r.size == 0:
        return []
    prev = np.empty_like(r)
    prev[0] = 0.0
    prev[1:] = r[:-1]
    starts = np.flatnonzero(r != prev)
    ends = np.append(starts[1:], r.size)
    return [(int(a), int(b), float(prev[a]), float(r[a])) for a, b in zip(starts, ends)]


def step_overshoots(trace) -> list[float]:
    y = np.asarray(trace.output)
    out = []
    for a, b, lo, hi in reference_steps(trace):
        win = y[a:b]
        size = hi - lo
        excess = win.max() - hi if size > 0 else hi - win.min()
        out.append(max(0.0, 100.0 * float(excess) / abs(size)))
    return out


def overshoot(trace) -> float:
    """Largest per-step percentage overshoot, measured over each step's window."""
    per_step = step_overshoots(trace)
    if not per_step:
        raise NoStepError("the reference never changes")
    return max(per_step)


def classify_stability(trace, bound_factor: float = 10.0) -> str:
    """``"unstable"`` iff |y| ever exceeds bound_factor x the reference amplitude or goes non-finite."""
    if not bound_factor > 1:
        raise ValueError("bound_factor must exceed 1")
    y = np.asarray(trace.output)
    # a run cut short by the divergence guard counts as non-finite growth
    if getattr(trace, "diverged_at", None) is not None or not np.all(np.isfinite(y)):
        return "unstable"
    amp = float(np.max(np.abs(trace.reference))) if len(trace.reference) else 0.0
    if y.size and float(np.max(np.abs(y))) > bound_factor * amp:
        return "unstable"
    return "stable"


def delay_stats(trace) -> dict[str, DelayStats | None]:
    """Per-direction network delay of delivered control-loop frames.

    A direction with no delivered frame maps to ``None``.
    """
    delays: dict[str, list[int]] = {d: [] for d in DIRECTIONS.values()}
    for f in trace.frames:
        d = DIRECTIONS.get(f.kind)
        if d is not None and f.t_deliver is not None:
            delays[d].append(f.t_deliver - f.t_submit)
    out: dict[str, DelayStats | None] = {}
    for d, vals in delays.items():
        if not vals:
            out[d] = None
            continue
        a = np.asarray(vals, dtype=np.int64)
        lo, hi = int(a.min()), int(a.max())
        out[d] = DelayStats(mean=float(a.mean()) / NS_PER_S, max=hi / NS_PER_S, min=lo / NS_PER_S, jitter=(hi - lo) / NS_PER_S, count=len(vals))
    return out
