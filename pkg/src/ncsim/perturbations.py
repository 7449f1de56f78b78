"""Bernoulli packet loss and periodic interference traffic."""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from .frames import Frame

MODES = ("bandwidth-fraction", "packets-per-period")


class OversubscriptionError(ValueError):
    """A bandwidth fraction above 1 cannot be offered in bandwidth-fraction mode."""


class LossModel:
    """Independent per-frame drop with fixed probability, drawn from a dedicated stream."""

    def __init__(self, probability: float, stream: np.random.Generator):
        if not 0.0 <= probability <= 1.0:
            raise ValueError(f"loss probability must lie in [0, 1], got {probability}")
        self.probability = probability
        self.stream = stream
        self.dropped = 0
        self.decisions = 0

    def maybe_drop(self, frame: Frame | None = None) -> bool:
        """True when the frame is lost. One draw per call regardless of ``p``."""
        self.decisions += 1
        drop = self.stream.random() < self.probability
        if drop:
            self.dropped += 1
            if frame is not None:
                frame.dropped = True
        return drop


def maybe_drop(frame: Frame, model: LossModel) -> str:
    return "drop" if model.maybe_drop(frame) else "keep"


def fragment(payload_bytes: int, max_payload: int) -> list[int]:
    """Split a payload into ``max_payload`` pieces plus a final remainder."""
    if max_payload <= 0:
        raise ValueError("max_payload must be positive")
    if payload_bytes <= 0:
        return [0]
    full, rest = divmod(payload_bytes, max_payload)
    return [max_payload] * full + ([rest] if rest else [])


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class InterferenceConfig:
    period: float = 0.007
    mode: str = "bandwidth-fraction"
    bandwidth_fraction: float = 0.0
    packets_per_period: int = 0
    payload_bytes: int = 10
    can_priority: int = 3
    # Offset of the first burst. None draws it uniformly in [0, period) from
    # the run's "interference-jitter" stream.
    phase: float | None = None

    def __post_init__(self):
        if not self.period > 0:
            raise ValueError(f"interference period must be positive, got {self.period}")
        if self.mode not in MODES:
            raise ValueError(f"interference mode must be one of {MODES}, got {self.mode!r}")
        if self.bandwidth_fraction < 0:
            raise ValueError("bandwidth_fraction must be non-negative")
        if self.mode == "bandwidth-fraction" and self.bandwidth_fraction > 1:
            raise OversubscriptionError(
                f"bandwidth_fraction {self.bandwidth_fraction} exceeds link capacity; "
                "use packets-per-period mode to oversubscribe deliberately"
            )
        if self.packets_per_period < 0:
            raise ValueError("packets_per_period must be non-negative")
        if self.payload_bytes < 0:
            raise ValueError("payload_bytes must be non-negative")


@dataclass(frozen=True)
class InterferencePlan:
    """What one period's burst looks like on a given network."""

    packets: int
    fragments: tuple[int, ...]  # payload bytes of each frame of one packet
    packet_bits: int  # on-wire bits of one packet, all fragments
    period: float

    @property
    def burst(self) -> list[int]:
        return list(self.fragments) * self.packets

    @property
    def bits_per_period(self) -> int:
        return self.packets * self.packet_bits

    def offered_load(self, bitrate: float) -> float:
        return self.bits_per_period / (bitrate * self.period)


def generate_interference(cfg: InterferenceConfig, bitrate: float, max_payload: int, frame_bits: Callable[[int], int]) -> InterferencePlan:
    """Size the periodic burst for a network.

    ``frame_bits(payload)`` is the on-wire size of one frame carrying
    ``payload`` bytes; ``max_payload`` the per-frame payload cap (8 on CAN).
    In bandwidth-fraction mode the packet count is
    round_half_up(fraction * bitrate * period / packet_bits).
    """
    frags = tuple(fragment(cfg.payload_bytes, max_payload))
    packet_bits = sum(frame_bits(b) for b in frags)
    if cfg.mode == "packets-per-period":
        n = cfg.packets_per_period
    elif cfg.bandwidth_fraction == 0:
        n = 0
    else:
        n = round_half_up(cfg.bandwidth_fraction * bitrate * cfg.period / packet_bits)
    return InterferencePlan(n, frags, packet_bits, cfg.period)
