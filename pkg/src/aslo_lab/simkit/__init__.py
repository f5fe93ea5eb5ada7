"""Deterministic fixed-step co-simulation of plant + observers."""

from .integrate import rk4_step
from .metrics import DecayFit, fit_decay_rate, metrics, settling_time
from .noise import NoiseSource
from .runner import Simulation, Trace, run
from .scenario import Disturbance, ObserverSpec, Scenario

__all__ = [
    "Disturbance",
    "DecayFit",
    "NoiseSource",
    "ObserverSpec",
    "Scenario",
    "Simulation",
    "Trace",
    "fit_decay_rate",
    "metrics",
    "rk4_step",
    "run",
    "settling_time",
]
