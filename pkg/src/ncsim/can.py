"""CAN bus: shared medium, identifier arbitration at idle instants, no preemption."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Iterable

from .frames import KIND_RANK, Frame
from .kernel import NS_PER_S, Simulator

MAX_PAYLOAD = 8


class OversizeError(ValueError):
    """CAN payloads are limited to 8 bytes; callers fragment first."""


class NoPendingError(LookupError):
    pass


@dataclass(frozen=True)
class CanBusParams:
    bitrate: float = 1_000_000
    overhead_bits: int = 0

    def __post_init__(self):
        if not self.bitrate > 0:
            raise ValueError(f"bitrate must be positive, got {self.bitrate}")
        if self.overhead_bits < 0:
            raise ValueError("overhead_bits must be non-negative")


def frame_bits(payload_bytes: int, params: CanBusParams) -> int:
    return payload_bytes * 8 + params.overhead_bits


def frame_duration(frame: Frame | int, params: CanBusParams) -> int:
    """Bus occupancy in nanoseconds, rounded up to the next nanosecond."""
    nbytes = frame if isinstance(frame, int) else frame.payload_bytes
    return bits_to_ticks(frame_bits(nbytes, params), params.bitrate)


def bits_to_ticks(bits: int, bitrate: float) -> int:
    if float(bitrate).is_integer():
        return -(-bits * NS_PER_S // int(bitrate))
    return math.ceil(bits * NS_PER_S / bitrate)


def arbitration_key(frame: Frame) -> tuple:
    # lowest identifier wins; then earliest submission, sensor before actuation, insertion order
    return (frame.ident, frame.t_submit, KIND_RANK.get(frame.kind, 3), frame.seq)


def arbitrate(pending: Iterable[Frame]) -> Frame:
    """Winner of bit-wise arbitration among the frames pending at an idle instant."""
    best = None
    best_key = None
    for f in pending:
        k = arbitration_key(f)
        if best is None or k < best_key:
            best, best_key = f, k
    if best is None:
        raise NoPendingError("arbitration over an empty set of frames")
    return best


class CanBus:
    """Broadcast bus owned by one simulation run.

    Frames submitted while the bus is busy wait; at each idle instant every
    pending frame competes and the minimum identifier transmits. Losers stay
    pending with no back-off. Delivered frames are handed to ``on_deliver``.
    """

    def __init__(self, sim: Simulator, params: CanBusParams = CanBusParams(), on_deliver: Callable[[Frame], None] | None = None):
        self.sim = sim
        self.params = params
        self.on_deliver = on_deliver
        self._pending: list[tuple] = []
        self._seq = 0
        self._arbitration_scheduled = False
        self.current: Frame | None = None
        self.busy_time = 0
        self.occupancy: list[tuple[int, int]] = []
        self.record_occupancy = False

    @property
    def idle(self) -> bool:
        return self.current is None

    @property
    def pending(self) -> list[Frame]:
        return [entry[-1] for entry in sorted(self._pending)]

    def submit(self, frame: Frame) -> None:
        if frame.payload_bytes > MAX_PAYLOAD:
            raise OversizeError(f"CAN payload of {frame.payload_bytes} bytes exceeds {MAX_PAYLOAD}")
        frame.t_submit = self.sim.now
        frame.seq = self._seq
        self._seq += 1
        heapq.heappush(self._pending, (*arbitration_key(frame), frame))
        if self.current is None and not self._arbitration_scheduled:
            self._schedule_arbitration()

    def _schedule_arbitration(self):
        # Arbitrate as a separate event at the current instant so every frame
        # submitted at this same time joins the competition.
        self._arbitration_scheduled = True
        self.sim.schedule(self.sim.now, self.on_bus_idle, target="can-bus", kind="bus-idle")

    def on_bus_idle(self) -> None:
        self._arbitration_scheduled = False
        if self.current is not None or not self._pending:
            return
        frame = heapq.heappop(self._pending)[-1]
        self.current = frame
        dur = frame_duration(frame, self.params)
        self.sim.schedule(self.sim.now + dur, self._complete, frame, dur, target="can-bus", kind="transmission-complete")

    def _complete(self, frame: Frame, dur: int) -> None:
        now = self.sim.now
        self.current = None
        self.busy_time += dur
        if self.record_occupancy:
            self.occupancy.append((now - dur, now))
        frame.t_deliver = now
        if self.on_deliver is not None:
            self.on_deliver(frame)
        if self._pending and not self._arbitration_scheduled:
            self._schedule_arbitration()
