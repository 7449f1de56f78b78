from .export import export
from .metrics import DelayStats, NoStepError, classify_stability, delay_stats, overshoot, step_overshoots
from .runner import Ensemble, RunSummary, RunTrace, run_ensemble, run_scenario
from .scenario import (
    LossConfig,
    NetworkConfig,
    Scenario,
    ScenarioError,
    bundled,
    bundled_names,
    load_scenario,
    scenario_from_mapping,
    with_overrides,
)

__all__ = [
    "DelayStats",
    "Ensemble",
    "LossConfig",
    "NetworkConfig",
    "NoStepError",
    "RunSummary",
    "RunTrace",
    "Scenario",
    "ScenarioError",
    "bundled",
    "bundled_names",
    "classify_stability",
    "delay_stats",
    "export",
    "load_scenario",
    "overshoot",
    "run_ensemble",
    "run_scenario",
    "scenario_from_mapping",
    "step_overshoots",
    "with_overrides",
]
