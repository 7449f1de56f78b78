"""Experiment description and its ``key = value`` file format.

A scenario file is line oriented::

    # comment
    network.kind = can
    loss.probability = 0.05

Blank lines and ``#`` comments are ignored. Unknown keys, missing required
keys and out-of-range values raise :class:`ScenarioError` naming the key.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Any, Callable, Mapping

from ..controller import DERIVATIVE_MODES, ControllerParams, ReferenceConfig
from ..perturbations import InterferenceConfig, OversubscriptionError

NETWORK_KINDS = ("can", "switched-ethernet")
INTERFERENCE_MODES = ("none", "bandwidth-fraction", "packets-per-period")
TRAFFIC_CLASSES = ("controller", "process", "overload")
CAN_MAX_IDENT = 0x7FF


class ScenarioError(ValueError):
    def __init__(self, key: str | None, message: str, path: str | None = None):
        self.key = key
        self.path = path
        where = f"{path}: " if path else ""
        what = f"{key}: " if key else ""
        super().__init__(f"{where}{what}{message}")


@dataclass(frozen=True)
class NetworkConfig:
    kind: str = "can"
    bitrate_bps: float | None = None  # None: 1 Mbit/s on CAN, 100 Mbit/s on Ethernet
    overhead_bits: int = 0
    min_frame_bytes: int = 64
    overhead_bytes: int = 0
    switch_latency_s: float = 0.0
    control_frame_bytes: int | None = None  # None: 8 on CAN, 64 on Ethernet
    combined_process_node: bool = False

    @property
    def bitrate(self) -> float:
        if self.bitrate_bps is not None:
            return self.bitrate_bps
        return 1e6 if self.kind == "can" else 1e8

    @property
    def frame_bytes(self) -> int:
        if self.control_frame_bytes is not None:
            return self.control_frame_bytes
        return 8 if self.kind == "can" else 64


@dataclass(frozen=True)
class LossConfig:
    probability: float = 0.0
    apply_sensor: bool = True
    apply_actuation: bool = True


@dataclass(frozen=True)
class Scenario:
    network: NetworkConfig = field(default_factory=NetworkConfig)
    controller: ControllerParams = field(default_factory=ControllerParams)
    reference: ReferenceConfig = field(default_factory=ReferenceConfig)
    loss: LossConfig = field(default_factory=LossConfig)
    interference: InterferenceConfig | None = None
    priorities: Mapping[str, int] = field(default_factory=lambda: {"controller": 1, "process": 2, "overload": 3})
    duration_s: float = 10.0
    seed: int = 0
    exec_delay_s: float = 0.0
    max_step_s: float = 100e-6
    bound_factor: float = 10.0
    name: str = ""

    def with_seed(self, seed: int) -> "Scenario":
        return replace(self, seed=int(seed))

    def to_mapping(self) -> dict[str, str]:
        return _to_mapping(self)


# key -> (parser, required)


def _float(lo=None, hi=None, lo_open=False):
    def parse(text):
        v = float(text)
        if not math.isfinite(v):
            raise ValueError("must be finite")
        if lo is not None and (v < lo or (lo_open and v == lo)):
            raise ValueError(f"must be {'>' if lo_open else '>='} {lo}")
        if hi is not None and v > hi:
            raise ValueError(f"must be <= {hi}")
        return v

    return parse


def _int(lo=None, hi=None):
    def parse(text):
        f = float(text)
        if not f.is_integer():
            raise ValueError("must be an integer")
        v = int(f)
        if lo is not None and v < lo:
            raise ValueError(f"must be >= {lo}")
        if hi is not None and v > hi:
            raise ValueError(f"must be <= {hi}")
        return v

    return parse


def _choice(options):
    def parse(text):
        if text not in options:
            raise ValueError(f"must be one of {', '.join(options)}")
        return text

    return parse


def _bool(text):
    t = text.lower()
    if t in ("true", "yes", "1", "on"):
        return True
    if t in ("false", "no", "0", "off"):
        return False
    raise ValueError("must be true or false")


def _phase(text):
    if text == "random":
        return None
    return _float(lo=0.0)(text)


KEYS: dict[str, Callable[[str], Any]] = {
    "network.kind": _choice(NETWORK_KINDS),
    "network.bitrate_bps": _float(lo=0.0, lo_open=True),
    "network.overhead_bits": _int(lo=0),
    "network.min_frame_bytes": _int(lo=0),
    "network.overhead_bytes": _int(lo=0),
    "network.switch_latency_s": _float(lo=0.0),
    "network.control_frame_bytes": _int(lo=0),
    "network.combined_process_node": _bool,
    "controller.kp": _float(),
    "controller.kd": _float(),
    "controller.ki": _float(),
    "controller.h": _float(lo=0.0, lo_open=True),
    "controller.derivative_on": _choice(DERIVATIVE_MODES),
    "controller.exec_delay_s": _float(lo=0.0),
    "reference.amplitude": _float(),
    "reference.period": _float(lo=0.0, lo_open=True),
    "loss.probability": _float(lo=0.0, hi=1.0),
    "loss.apply_sensor": _bool,
    "loss.apply_actuation": _bool,
    "interference.mode": _choice(INTERFERENCE_MODES),
    "interference.period_s": _float(lo=0.0, lo_open=True),
    "interference.bandwidth_fraction": _float(lo=0.0),
    "interference.packets_per_period": _int(lo=0),
    "interference.payload_bytes": _int(lo=0),
    "interference.phase_s": _phase,
    "priority.controller": _int(lo=0, hi=CAN_MAX_IDENT),
    "priority.process": _int(lo=0, hi=CAN_MAX_IDENT),
    "priority.overload": _int(lo=0, hi=CAN_MAX_IDENT),
    "sim.duration_s": _float(lo=0.0, lo_open=True),
    "sim.seed": _int(lo=0),
    "sim.max_step_s": _float(lo=0.0, lo_open=True),
    "sim.bound_factor": _float(lo=1.0, lo_open=True),
}

REQUIRED = ("network.kind",)
REQUIRED_CAN = ("priority.controller", "priority.process", "priority.overload")


def parse_text(text: str, path: str | None = None) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ScenarioError(None, f"line {lineno}: expected 'key = value', got {raw.strip()!r}", path)
        key, value = (part.strip() for part in line.split("=", 1))
        if key in out:
            raise ScenarioError(key, f"line {lineno}: duplicate key", path)
        out[key] = value
    return out


def scenario_from_mapping(raw: Mapping[str, str], path: str | None = None, name: str = "") -> Scenario:
    vals: dict[str, Any] = {}
    for key, text in raw.items():
        parser = KEYS.get(key)
        if parser is None:
            raise ScenarioError(key, "unknown key", path)
        try:
            vals[key] = parser(str(text).strip())
        except ValueError as exc:
            raise ScenarioError(key, f"invalid value {text!r} ({exc})", path) from None
    for key in REQUIRED:
        if key not in vals:
            raise ScenarioError(key, "missing required key", path)
    kind = vals["network.kind"]
    if kind == "can":
        for key in REQUIRED_CAN:
            if key not in vals:
                raise ScenarioError(key, "missing required key for a CAN scenario", path)

    def get(key, default):
        return vals.get(key, default)

    network = NetworkConfig(
        kind=kind,
        bitrate_bps=get("network.bitrate_bps", None),
        overhead_bits=get("network.overhead_bits", 0),
        min_frame_bytes=get("network.min_frame_bytes", 64),
        overhead_bytes=get("network.overhead_bytes", 0),
        switch_latency_s=get("network.switch_latency_s", 0.0),
        control_frame_bytes=get("network.control_frame_bytes", None),
        combined_process_node=get("network.combined_process_node", False),
    )
    if kind == "can" and network.frame_bytes > 8:
        raise ScenarioError("network.control_frame_bytes", "CAN frames carry at most 8 bytes", path)
    controller = ControllerParams(
        kp=get("controller.kp", 1.5),
        kd=get("controller.kd", 0.054),
        ki=get("controller.ki", 0.0),
        h=get("controller.h", 0.01),
        derivative_on=get("controller.derivative_on", "error"),
    )
    reference = ReferenceConfig(amplitude=get("reference.amplitude", 1.0), period=get("reference.period", 1.0))
    loss = LossConfig(
        probability=get("loss.probability", 0.0),
        apply_sensor=get("loss.apply_sensor", True),
        apply_actuation=get("loss.apply_actuation", True),
    )
    priorities = {
        "controller": get("priority.controller", 1),
        "process": get("priority.process", 2),
        "overload": get("priority.overload", 3),
    }
    interference = None
    mode = get("interference.mode", "none")
    if mode != "none":
        try:
            interference = InterferenceConfig(
                period=get("interference.period_s", 0.007),
                mode=mode,
                bandwidth_fraction=get("interference.bandwidth_fraction", 0.0),
                packets_per_period=get("interference.packets_per_period", 0),
                payload_bytes=get("interference.payload_bytes", 10),
                can_priority=priorities["overload"],
                phase=get("interference.phase_s", None),
            )
        except OversubscriptionError as exc:
            raise ScenarioError("interference.bandwidth_fraction", str(exc), path) from None
    return Scenario(
        network=network,
        controller=controller,
        reference=reference,
        loss=loss,
        interference=interference,
        priorities=priorities,
        duration_s=get("sim.duration_s", 10.0),
        seed=get("sim.seed", 0),
        exec_delay_s=get("controller.exec_delay_s", 0.0),
        max_step_s=get("sim.max_step_s", 100e-6),
        bound_factor=get("sim.bound_factor", 10.0),
        name=name,
    )


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(None, f"cannot read scenario file ({exc.strerror})", str(path)) from None
    return scenario_from_mapping(parse_text(text, str(path)), str(path), name=path.stem)


def with_overrides(scenario: Scenario, overrides: Mapping[str, Any]) -> Scenario:
    """Re-validate a scenario with some keys replaced (values as text or numbers)."""
    raw = scenario.to_mapping()
    raw.update({k: str(v) for k, v in overrides.items()})
    return scenario_from_mapping(raw, name=scenario.name)


def bundled(name: str) -> Scenario:
    """One of the scenario files shipped in ``ncsim/scenarios``."""
    fname = name if name.endswith(".cfg") else f"{name}.cfg"
    ref = resources.files("ncsim") / "scenarios" / fname
    if not ref.is_file():
        raise ScenarioError(None, f"no bundled scenario named {name!r}")
    return scenario_from_mapping(parse_text(ref.read_text(), fname), fname, name=fname[:-4])


def bundled_names() -> list[str]:
    root = resources.files("ncsim") / "scenarios"
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".cfg"))


def _num(v) -> str:
    return repr(v) if isinstance(v, float) else str(v)


def _to_mapping(s: Scenario) -> dict[str, str]:
    n = s.network
    m = {
        "network.kind": n.kind,
        "network.overhead_bits": _num(n.overhead_bits),
        "network.min_frame_bytes": _num(n.min_frame_bytes),
        "network.overhead_bytes": _num(n.overhead_bytes),
        "network.switch_latency_s": _num(n.switch_latency_s),
        "network.combined_process_node": str(n.combined_process_node).lower(),
        "controller.kp": _num(s.controller.kp),
        "controller.kd": _num(s.controller.kd),
        "controller.ki": _num(s.controller.ki),
        "controller.h": _num(s.controller.h),
        "controller.derivative_on": s.controller.derivative_on,
        "controller.exec_delay_s": _num(s.exec_delay_s),
        "reference.amplitude": _num(s.reference.amplitude),
        "reference.period": _num(s.reference.period),
        "loss.probability": _num(s.loss.probability),
        "loss.apply_sensor": str(s.loss.apply_sensor).lower(),
        "loss.apply_actuation": str(s.loss.apply_actuation).lower(),
        "priority.controller": _num(s.priorities["controller"]),
        "priority.process": _num(s.priorities["process"]),
        "priority.overload": _num(s.priorities["overload"]),
        "sim.duration_s": _num(s.duration_s),
        "sim.seed": _num(s.seed),
        "sim.max_step_s": _num(s.max_step_s),
        "sim.bound_factor": _num(s.bound_factor),
    }
    if n.bitrate_bps is not None:
        m["network.bitrate_bps"] = _num(n.bitrate_bps)
    if n.control_frame_bytes is not None:
        m["network.control_frame_bytes"] = _num(n.control_frame_bytes)
    i = s.interference
    if i is None:
        m["interference.mode"] = "none"
    else:
        m.update(
            {
                "interference.mode": i.mode,
                "interference.period_s": _num(i.period),
                "interference.bandwidth_fraction": _num(i.bandwidth_fraction),
                "interference.packets_per_period": _num(i.packets_per_period),
                "interference.payload_bytes": _num(i.payload_bytes),
                "interference.phase_s": "random" if i.phase is None else _num(i.phase),
            }
        )
    return m
