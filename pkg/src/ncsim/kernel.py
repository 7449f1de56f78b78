"""Deterministic discrete-event engine.

Simulated time is an integer count of nanoseconds. Every duration the loop
uses (10 ms sampling, 7 ms interference period, 64 us CAN frames, 5.12 us
Ethernet frames) is an exact integer at this resolution, so equal times
compare equal and runs of hours stay exact.
"""

from __future__ import annotations

import heapq
from typing import Any, Callable

import numpy as np

NS_PER_S = 1_000_000_000


class PastEventError(ValueError):
    """Raised when an event is scheduled before the current clock."""


def to_ticks(seconds: float) -> int:
    """Convert seconds to integer nanoseconds (nearest)."""
    return int(round(seconds * NS_PER_S))


def to_seconds(ticks: int) -> float:
    return ticks / NS_PER_S


def format_ticks(ticks: int) -> str:
    """Exact decimal rendering of a tick count in seconds, e.g. ``0.000064000``."""
    sign = "-" if ticks < 0 else ""
    q, r = divmod(abs(ticks), NS_PER_S)
    return f"{sign}{q}.{r:09d}"


class Event:
    __slots__ = ("due", "seq", "target", "kind", "callback", "args", "cancelled")

    def __init__(self, due, seq, target, kind, callback, args):
        self.due = due
        self.seq = seq
        self.target = target
        self.kind = kind
        self.callback = callback
        self.args = args
        self.cancelled = False

    def cancel(self) -> None:
        """Tombstone the event; it stays queued but is skipped at dispatch."""
        self.cancelled = True

    def __repr__(self) -> str:
        return f"Event(due={self.due}, seq={self.seq}, kind={self.kind!r}, target={self.target!r})"


class Simulator:
    """Clock plus a time-ordered event queue.

    Events dispatch in ``(due, seq)`` order where ``seq`` is a per-simulator
    insertion counter, so simultaneous events run in the order they were
    scheduled.
    """

    def __init__(self) -> None:
        self.now = 0
        self._queue: list[tuple[int, int, Event]] = []
        self._seq = 0
        self._stopped = False
        self.dispatched = 0

    def __len__(self) -> int:
        return len(self._queue)

    def schedule(
        self,
        due: int,
        callback: Callable[..., Any],
        *args: Any,
        target: str | None = None,
        kind: str | None = None,
    ) -> Event:
        if due < self.now:
            raise PastEventError(f"event due at {due} ns scheduled when clock is {self.now} ns")
        ev = Event(due, self._seq, target, kind, callback, args)
        self._seq += 1
        heapq.heappush(self._queue, (due, ev.seq, ev))
        return ev

    def schedule_in(self, delay: int, callback: Callable[..., Any], *args: Any, **kw: Any) -> Event:
        return self.schedule(self.now + delay, callback, *args, **kw)

    def stop(self) -> None:
        """Make the running ``run_until`` return after the current handler."""
        self._stopped = True

    def run_until(self, t_end: int) -> int:
        """Dispatch every event due at or before ``t_end``; return how many ran."""
        if t_end < self.now:
            raise PastEventError(f"run_until({t_end}) is before the clock ({self.now})")
        queue = self._queue
        count = 0
        self._stopped = False
        while queue and queue[0][0] <= t_end:
            due, _, ev = heapq.heappop(queue)
            if ev.cancelled:
                continue
            self.now = due
            ev.callback(*ev.args)
            count += 1
            if self._stopped:
                self.dispatched += count
                return count
        self.now = t_end
        self.dispatched += count
        return count


def rng_stream(seed: int, label: str) -> np.random.Generator:
    """Independent generator for one randomness consumer.

    The label is folded into the seed sequence's spawn key, so streams with
    different labels share no state and a new consumer never shifts the
    draws of an existing one.
    """
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(label.encode("utf-8")))
    return np.random.Generator(np.random.PCG64(ss))
