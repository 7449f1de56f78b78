"""Closed-loop execution of a scenario.

Topology per run: a time-driven sensor samples y every h seconds and sends
it to the controller; the controller runs the PD law when the measurement
arrives and sends u to the actuator; the actuator applies u on arrival and
holds it. Interference flows from its own source to its own sink.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .. import can, ethernet
from ..controller import ControllerState, control_step, reference_ticks
from ..frames import ACTUATION, INTERFERENCE, SENSOR, Frame
from ..kernel import NS_PER_S, Simulator, rng_stream, to_ticks
from ..perturbations import InterferencePlan, LossModel, generate_interference
from ..plant import IntegrationConfig, Plant
from .metrics import NoStepError, classify_stability, delay_stats, overshoot
from .scenario import Scenario

SENSOR_NODE = "sensor"
CONTROLLER_NODE = "controller"
ACTUATOR_NODE = "actuator"
PROCESS_NODE = "process"
INTERFERENCE_SOURCE = "interference-source"
INTERFERENCE_SINK = "interference-sink"

# Growth past this multiple of the reference amplitude ends the run early.
DIVERGENCE_CAP = 1e6


@dataclass
class RunTrace:
    time: np.ndarray  # int64 nanoseconds
    reference: np.ndarray
    output: np.ndarray
    control: np.ndarray
    frames: list[Frame]
    amplitude: float
    t_end: int
    diverged_at: int | None = None

    @property
    def time_s(self) -> np.ndarray:
        return self.time / NS_PER_S


@dataclass
class RunSummary:
    overshoot_pct: float | None
    stable: bool
    mean_delay_s: dict[str, float | None]
    max_delay_s: dict[str, float | None]
    jitter_s: dict[str, float | None]
    dropped_frames: int
    offered_interference_load: float
    diverged_at_s: float | None = None
    seed: int = 0
    extra: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        def clean(v):
            if isinstance(v, float) and not math.isfinite(v):
                return None
            if isinstance(v, dict):
                return {k: clean(x) for k, x in v.items()}
            return v

        return clean(
            {
                "overshoot_pct": self.overshoot_pct,
                "stable": self.stable,
                "mean_delay_s": self.mean_delay_s,
                "max_delay_s": self.max_delay_s,
                "jitter_s": self.jitter_s,
                "dropped_frames": self.dropped_frames,
                "offered_interference_load": self.offered_interference_load,
                "diverged_at_s": self.diverged_at_s,
                "seed": self.seed,
            }
        )


def interference_plan(s: Scenario) -> InterferencePlan | None:
    if s.interference is None:
        return None
    n = s.network
    if n.kind == "can":
        params = can.CanBusParams(n.bitrate, n.overhead_bits)
        return generate_interference(s.interference, n.bitrate, can.MAX_PAYLOAD, lambda b: can.frame_bits(b, params))
    params = _eth_params(s)
    return generate_interference(s.interference, n.bitrate, ethernet.MAX_PAYLOAD, lambda b: ethernet.wire_bytes(b, params) * 8)


def _eth_params(s: Scenario) -> ethernet.EthParams:
    n = s.network
    return ethernet.EthParams(
        link_rate=n.bitrate,
        min_frame_bytes=n.min_frame_bytes,
        overhead_bytes=n.overhead_bytes,
        switch_latency=n.switch_latency_s,
    )


class _Loop:
    def __init__(self, s: Scenario):
        self.s = s
        self.sim = Simulator()
        self.plant = Plant(IntegrationConfig(s.max_step_s))
        self.ctrl = ControllerState(s.controller)
        self.h = to_ticks(s.controller.h)
        self.t_end = to_ticks(s.duration_s)
        self.ref_period = to_ticks(s.reference.period)
        self.amp = s.reference.amplitude
        self.cap = DIVERGENCE_CAP * max(abs(self.amp), 1e-12)
        self.exec_delay = to_ticks(s.exec_delay_s)
        self.loss = LossModel(s.loss.probability, rng_stream(s.seed, "loss"))
        self.frames: list[Frame] = []
        self.rows_t: list[int] = []
        self.rows_r: list[float] = []
        self.rows_y: list[float] = []
        self.rows_u: list[float] = []
        self.diverged_at: int | None = None

        n = s.network
        combined = n.combined_process_node
        self.sensor_node = PROCESS_NODE if combined else SENSOR_NODE
        self.actuator_node = PROCESS_NODE if combined else ACTUATOR_NODE
        self.frame_bytes = n.frame_bytes
        if n.kind == "can":
            self.net = can.CanBus(self.sim, can.CanBusParams(n.bitrate, n.overhead_bits), self._on_deliver)
            self.ident = {
                SENSOR: s.priorities["process"],
                ACTUATION: s.priorities["controller"],
                INTERFERENCE: s.priorities["overload"],
            }
        else:
            nodes = {self.sensor_node, CONTROLLER_NODE, self.actuator_node, INTERFERENCE_SOURCE, INTERFERENCE_SINK}
            self.net = ethernet.SwitchedEthernet(self.sim, _eth_params(s), sorted(nodes), self._on_deliver)
            self.ident = {SENSOR: 0, ACTUATION: 0, INTERFERENCE: 0}

        self.plan = interference_plan(s)
        self.burst: list[int] = self.plan.burst if self.plan is not None else []
        if self.burst:
            self.i_period = to_ticks(s.interference.period)
            phase = s.interference.phase
            if phase is None:
                phase = rng_stream(s.seed, "interference-jitter").random() * s.interference.period
            self.i_phase = to_ticks(phase) % self.i_period

    # recording

    def _row(self, t: int, r: float, y: float, u: float) -> None:
        if self.rows_t and self.rows_t[-1] == t:
            self.rows_r[-1], self.rows_y[-1], self.rows_u[-1] = r, y, u
            return
        self.rows_t.append(t)
        self.rows_r.append(r)
        self.rows_y.append(y)
        self.rows_u.append(u)

    def _check(self, y: float) -> bool:
        if not math.isfinite(y) or abs(y) > self.cap:
            self.diverged_at = self.sim.now
            self.sim.stop()
            return False
        return True

    def _ref(self, t: int) -> float:
        return reference_ticks(t, self.amp, self.ref_period)

    # nodes

    def _sample(self, k: int) -> None:
        now = self.sim.now
        st = self.plant.advance_to(now)
        y = st.x1
        self._row(now, self._ref(now), y, st.u_held)
        if not self._check(y):
            return
        f = Frame(self.ident[SENSOR], self.sensor_node, CONTROLLER_NODE, self.frame_bytes, SENSOR, value=y)
        self._send(f, self.s.loss.apply_sensor)
        nxt = (k + 1) * self.h
        if nxt <= self.t_end:
            self.sim.schedule(nxt, self._sample, k + 1, target=self.sensor_node, kind="sample-due")

    def _send(self, f: Frame, lossy: bool) -> None:
        f.t_submit = self.sim.now
        self.frames.append(f)
        if lossy and self.loss.maybe_drop(f):
            return
        self.net.submit(f)

    def _on_deliver(self, f: Frame) -> None:
        kind = f.kind
        if kind == SENSOR:
            if self.exec_delay:
                self.sim.schedule(self.sim.now + self.exec_delay, self._execute, f.value, target=CONTROLLER_NODE, kind="timer-fired")
            else:
                self._execute(f.value)
        elif kind == ACTUATION:
            self._actuate(f.value)

    def _execute(self, y: float) -> None:
        r = self._ref(self.sim.now)
        u, self.ctrl = control_step(self.ctrl, r, y)
        f = Frame(self.ident[ACTUATION], CONTROLLER_NODE, self.actuator_node, self.frame_bytes, ACTUATION, value=u)
        self._send(f, self.s.loss.apply_actuation)

    def _actuate(self, u: float) -> None:
        now = self.sim.now
        st = self.plant.advance_to(now)
        self.plant.apply(u)
        self._row(now, self._ref(now), st.x1, u)
        self._check(st.x1)

    def _interfere(self, j: int) -> None:
        ident = self.ident[INTERFERENCE]
        for b in self.burst:
            f = Frame(ident, INTERFERENCE_SOURCE, INTERFERENCE_SINK, b, INTERFERENCE)
            f.t_submit = self.sim.now
            self.frames.append(f)
            self.net.submit(f)
        nxt = self.i_phase + (j + 1) * self.i_period
        if nxt <= self.t_end:
            self.sim.schedule(nxt, self._interfere, j + 1, target=INTERFERENCE_SOURCE, kind="timer-fired")

    def run(self) -> RunTrace:
        self.sim.schedule(0, self._sample, 0, target=self.sensor_node, kind="sample-due")
        if self.burst and self.i_phase <= self.t_end:
            self.sim.schedule(self.i_phase, self._interfere, 0, target=INTERFERENCE_SOURCE, kind="timer-fired")
        self.sim.run_until(self.t_end)
        if self.diverged_at is None:
            self.plant.advance_to(self.t_end)
        return RunTrace(
            time=np.asarray(self.rows_t, dtype=np.int64),
            reference=np.asarray(self.rows_r, dtype=float),
            output=np.asarray(self.rows_y, dtype=float),
            control=np.asarray(self.rows_u, dtype=float),
            frames=self.frames,
            amplitude=self.amp,
            t_end=self.t_end,
            diverged_at=self.diverged_at,
        )


def summarize(trace: RunTrace, s: Scenario) -> RunSummary:
    try:
        ov = overshoot(trace)
    except NoStepError:
        ov = None
    stats = delay_stats(trace)
    bits = sum(wire_bits(f.payload_bytes, s) for f in trace.frames if f.kind == INTERFERENCE)
    duration = s.duration_s
    return RunSummary(
        overshoot_pct=ov,
        stable=classify_stability(trace, s.bound_factor) == "stable",
        mean_delay_s={d: (v.mean if v else None) for d, v in stats.items()},
        max_delay_s={d: (v.max if v else None) for d, v in stats.items()},
        jitter_s={d: (v.jitter if v else None) for d, v in stats.items()},
        dropped_frames=sum(1 for f in trace.frames if f.dropped),
        offered_interference_load=bits / (duration * s.network.bitrate),
        diverged_at_s=None if trace.diverged_at is None else trace.diverged_at / NS_PER_S,
        seed=s.seed,
    )


def wire_bits(payload_bytes: int, s: Scenario) -> int:
    n = s.network
    if n.kind == "can":
        return can.frame_bits(payload_bytes, can.CanBusParams(n.bitrate, n.overhead_bits))
    return ethernet.wire_bytes(payload_bytes, _eth_params(s)) * 8


def run_scenario(s: Scenario) -> tuple[RunTrace, RunSummary]:
    trace = _Loop(s).run()
    return trace, summarize(trace, s)


@dataclass
class Ensemble:
    scenario: Scenario
    summaries: list[RunSummary]

    @property
    def stable_count(self) -> int:
        return sum(1 for r in self.summaries if r.stable)

    @property
    def unstable_count(self) -> int:
        return len(self.summaries) - self.stable_count

    def count(self, pred) -> int:
        return sum(1 for r in self.summaries if pred(r))

    @property
    def majority_stable(self) -> bool:
        return self.stable_count * 2 > len(self.summaries)


def run_ensemble(s: Scenario, seeds) -> Ensemble:
    """Independent runs of one configuration, one per seed."""
    return Ensemble(s, [run_scenario(s.with_seed(k))[1] for k in seeds])
