"""Switched Ethernet: one store-and-forward switch, full-duplex point-to-point links.

Every attached node owns an uplink (node -> switch) and a switch output
port (switch -> node). Both are plain FIFO servers; a frame is forwarded
only once fully received. There are no collisions and no priority classes.
"""

from __future__ import annotations

import heapq
from collections.abc import Callable, Iterable
from dataclasses import dataclass, field

from .can import bits_to_ticks
from .frames import Frame
from .kernel import Simulator, to_ticks

MAX_PAYLOAD = 1500


class TopologyError(KeyError):
    """A frame names a node that is not attached to the switch."""


@dataclass(frozen=True)
class EthParams:
    link_rate: float = 100_000_000
    min_frame_bytes: int = 64
    overhead_bytes: int = 0
    switch_latency: float = 0.0
    propagation_delay: float = 0.0

    def __post_init__(self):
        if not self.link_rate > 0:
            raise ValueError(f"link_rate must be positive, got {self.link_rate}")
        if self.min_frame_bytes < 0 or self.overhead_bytes < 0:
            raise ValueError("frame sizes must be non-negative")
        if self.switch_latency < 0 or self.propagation_delay < 0:
            raise ValueError("latencies must be non-negative")


def wire_bytes(payload_bytes: int, params: EthParams) -> int:
    return max(params.min_frame_bytes, payload_bytes + params.overhead_bytes)


def frame_duration(frame: Frame | int, params: EthParams) -> int:
    """Serialization time of one frame on one link, in nanoseconds."""
    nbytes = frame if isinstance(frame, int) else frame.payload_bytes
    return bits_to_ticks(wire_bytes(nbytes, params) * 8, params.link_rate)


@dataclass
class SwitchPort:
    """FIFO transmitter; ``queue`` is a heap of ``(t_enter, seq, frame, on_done)``."""

    name: str
    queue: list = field(default_factory=list)
    busy_until: int = 0
    in_service: Frame | None = None
    service_scheduled: bool = False
    busy_time: int = 0
    departures: list = field(default_factory=list)


class SwitchedEthernet:
    def __init__(
        self,
        sim: Simulator,
        params: EthParams = EthParams(),
        nodes: Iterable[str] = (),
        on_deliver: Callable[[Frame], None] | None = None,
    ):
        self.sim = sim
        self.params = params
        self.on_deliver = on_deliver
        self.uplinks: dict[str, SwitchPort] = {}
        self.ports: dict[str, SwitchPort] = {}
        self._latency = to_ticks(params.switch_latency)
        self._prop = to_ticks(params.propagation_delay)
        self._seq = 0
        self.record_departures = False
        for n in nodes:
            self.attach(n)

    def attach(self, node: str) -> None:
        self.uplinks[node] = SwitchPort(f"{node}->switch")
        self.ports[node] = SwitchPort(f"switch->{node}")

    def submit(self, frame: Frame, src: str | None = None) -> None:
        src = frame.src if src is None else src
        try:
            link = self.uplinks[src]
        except KeyError:
            raise TopologyError(f"node {src!r} is not attached to the switch") from None
        now = self.sim.now
        frame.t_submit = now
        frame.seq = self._seq
        self._seq += 1
        self._enqueue(link, frame, now, self._on_received)

    def forward(self, frame: Frame) -> None:
        """Frame fully received at the switch: queue it on the destination port."""
        try:
            port = self.ports[frame.dst]
        except KeyError:
            raise TopologyError(f"destination {frame.dst!r} is not attached to the switch") from None
        if self._latency:
            self.sim.schedule(self.sim.now + self._latency, self._enter_port, port, frame, target=port.name, kind="forward")
        else:
            self._enter_port(port, frame)

    def _enter_port(self, port: SwitchPort, frame: Frame) -> None:
        self._enqueue(port, frame, self.sim.now, self._on_delivered)

    def _on_received(self, link: SwitchPort, frame: Frame) -> None:
        if self._prop:
            self.sim.schedule(self.sim.now + self._prop, self.forward, frame, kind="propagation")
        else:
            self.forward(frame)

    def _on_delivered(self, port: SwitchPort, frame: Frame) -> None:
        if self._prop:
            self.sim.schedule(self.sim.now + self._prop, self._deliver, frame, kind="propagation")
        else:
            self._deliver(frame)

    def _deliver(self, frame: Frame) -> None:
        frame.t_deliver = self.sim.now
        if self.on_deliver is not None:
            self.on_deliver(frame)

    # FIFO server shared by uplinks and output ports

    def _enqueue(self, port: SwitchPort, frame: Frame, t_enter: int, done: Callable) -> None:
        heapq.heappush(port.queue, (t_enter, frame.seq, frame, done))
        if port.in_service is None and not port.service_scheduled:
            port.service_scheduled = True
            # Service at this same instant but after already-queued events, so
            # simultaneous arrivals are ordered by (arrival time, submission order).
            self.sim.schedule(self.sim.now, self._serve, port, target=port.name, kind="port-idle")

    def _serve(self, port: SwitchPort) -> None:
        port.service_scheduled = False
        if port.in_service is not None or not port.queue:
            return
        _, _, frame, done = heapq.heappop(port.queue)
        dur = frame_duration(frame, self.params)
        port.in_service = frame
        port.busy_until = self.sim.now + dur
        self.sim.schedule(port.busy_until, self._finish, port, frame, dur, done, target=port.name, kind="transmission-complete")

    def _finish(self, port: SwitchPort, frame: Frame, dur: int, done: Callable) -> None:
        port.in_service = None
        port.busy_time += dur
        if self.record_departures:
            port.departures.append((self.sim.now - dur, self.sim.now, frame))
        done(port, frame)
        if port.queue and not port.service_scheduled and port.in_service is None:
            if port.queue[0][0] < self.sim.now:
                # head arrived strictly earlier: nothing entering now can precede it
                self._serve(port)
            else:
                port.service_scheduled = True
                self.sim.schedule(self.sim.now, self._serve, port, target=port.name, kind="port-idle")
