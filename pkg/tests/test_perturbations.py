import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ncsim import can, ethernet
from ncsim.frames import Frame
from ncsim.kernel import rng_stream
from ncsim.perturbations import (
    InterferenceConfig,
    LossModel,
    OversubscriptionError,
    fragment,
    generate_interference,
    maybe_drop,
)


def _frame():
    return Frame(1, "a", "b", 8, "sensor")


def test_loss_extremes():
    keep = LossModel(0.0, rng_stream(1, "loss"))
    drop = LossModel(1.0, rng_stream(1, "loss"))
    assert all(maybe_drop(_frame(), keep) == "keep" for _ in range(1000))
    assert all(maybe_drop(_frame(), drop) == "drop" for _ in range(1000))
    assert drop.dropped == 1000


def test_loss_rate_within_three_sigma():
    m = LossModel(0.1, rng_stream(5, "loss"))
    n = 100_000
    dropped = sum(m.maybe_drop() for _ in range(n))
    sigma = math.sqrt(0.1 * 0.9 / n)
    assert abs(dropped / n - 0.1) <= 0.003
    assert 3 * sigma == pytest.approx(0.00285, abs=1e-5)


def test_loss_pattern_is_reproducible():
    a = [LossModel(0.2, rng_stream(9, "loss")) for _ in range(2)]
    pa = [a[0].maybe_drop() for _ in range(500)]
    pb = [a[1].maybe_drop() for _ in range(500)]
    assert pa == pb


def test_loss_probability_range():
    with pytest.raises(ValueError):
        LossModel(1.5, rng_stream(0, "loss"))


def test_fragment_examples():
    parts = fragment(1500, 8)
    assert len(parts) == 188 and parts[-1] == 4 and set(parts[:-1]) == {8}
    assert fragment(8, 8) == [8]
    assert fragment(10, 8) == [8, 2]


@given(st.integers(min_value=1, max_value=10_000), st.integers(min_value=1, max_value=64))
def test_fragments_sum_to_payload(payload, cap):
    parts = fragment(payload, cap)
    assert sum(parts) == payload
    assert len(parts) == -(-payload // cap)
    assert all(0 < p <= cap for p in parts)


def can_plan(cfg, params=can.CanBusParams()):
    return generate_interference(cfg, params.bitrate, can.MAX_PAYLOAD, lambda b: can.frame_bits(b, params))


def eth_plan(cfg, params=ethernet.EthParams()):
    return generate_interference(cfg, params.link_rate, ethernet.MAX_PAYLOAD, lambda b: ethernet.wire_bytes(b, params) * 8)


def test_zero_fraction_is_empty():
    assert can_plan(InterferenceConfig(bandwidth_fraction=0.0)).burst == []


def test_can_ten_percent_of_64_bit_frames():
    plan = can_plan(InterferenceConfig(bandwidth_fraction=0.10, payload_bytes=8))
    # round(0.1 * 1e6 * 0.007 / 64) = round(10.94)
    assert plan.packets == 11


def test_ethernet_ten_percent_of_1500_byte_frames():
    plan = eth_plan(InterferenceConfig(bandwidth_fraction=0.10, payload_bytes=1500))
    # round(0.1 * 1e8 * 0.007 / 12000) = round(5.83)
    assert plan.packets == 6


def test_can_10_byte_packets_are_fragmented():
    plan = can_plan(InterferenceConfig(bandwidth_fraction=0.10, payload_bytes=10))
    assert plan.fragments == (8, 2)
    # 80 bits per packet: round(700 / 80) = round(8.75)
    assert plan.packets == 9
    assert len(plan.burst) == 18


def test_packets_per_period_oversubscribes_can():
    plan = can_plan(InterferenceConfig(mode="packets-per-period", packets_per_period=1, payload_bytes=1500))
    assert len(plan.burst) == 188
    assert plan.offered_load(1e6) == pytest.approx(12_000 / 7_000, rel=1e-12)


def test_fraction_above_one_rejected():
    with pytest.raises(OversubscriptionError):
        InterferenceConfig(bandwidth_fraction=1.2)
    InterferenceConfig(mode="packets-per-period", bandwidth_fraction=1.2, packets_per_period=3)


@given(st.floats(min_value=0.001, max_value=1.0), st.sampled_from([2, 8, 10, 64, 100, 1500]))
def test_offered_load_within_one_packet_of_target(frac, payload):
    cfg = InterferenceConfig(bandwidth_fraction=frac, payload_bytes=payload)
    for plan, rate in ((can_plan(cfg), 1e6), (eth_plan(cfg), 1e8)):
        granularity = plan.packet_bits / (rate * cfg.period)
        assert abs(plan.offered_load(rate) - frac) <= granularity / 2 + 1e-12
