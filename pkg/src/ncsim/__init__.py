"""Networked control system co-simulation over CAN and switched Ethernet."""

from ._kernels import USING_NUMBA
from .experiments import Scenario, bundled, load_scenario, run_ensemble, run_scenario

__version__ = "0.1.0"

__all__ = ["Scenario", "USING_NUMBA", "bundled", "load_scenario", "run_ensemble", "run_scenario"]
