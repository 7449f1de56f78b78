"""Network message record shared by both media."""

from __future__ import annotations

SENSOR = "sensor"
ACTUATION = "actuation"
INTERFERENCE = "interference"

# Sub-ordering among frames of equal identifier and submission time.
KIND_RANK = {SENSOR: 0, ACTUATION: 1, INTERFERENCE: 2}


class Frame:
    """One message on the wire.

    ``t_submit`` and ``t_deliver`` are integer nanoseconds; ``t_deliver`` stays
    ``None`` until the addressed node has received the frame. ``value`` is the
    carried measurement or control signal.
    """

    __slots__ = ("ident", "src", "dst", "payload_bytes", "kind", "t_submit", "t_deliver", "value", "seq", "dropped")

    def __init__(self, ident, src, dst, payload_bytes, kind, value=None, t_submit=None):
        self.ident = ident
        self.src = src
        self.dst = dst
        self.payload_bytes = payload_bytes
        self.kind = kind
        self.value = value
        self.t_submit = t_submit
        self.t_deliver = None
        self.seq = -1
        self.dropped = False

    @property
    def delay(self):
        if self.t_deliver is None:
            return None
        return self.t_deliver - self.t_submit

    def __repr__(self):
        return (
            f"Frame({self.kind}, ident={self.ident}, {self.src}->{self.dst}, "
            f"{self.payload_bytes}B, submit={self.t_submit}, deliver={self.t_deliver})"
        )
