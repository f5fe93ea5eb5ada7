"""Scenario description: plant + observers + excitation + disturbances.

A scenario is the complete, seedable recipe for one run.  Disturbance
semantics (who sees what):

* ``none`` -- observers measure exactly the plant's (u, y).
* ``constant_on_output`` -- ``delta`` is added to every component of the
  observers' measured y; the plant is untouched.
* ``constant_on_input`` -- the *plant* receives u + delta while the
  observers keep measuring the clean u (models an unknown actuator bias).
* ``white_noise_on_measured_input`` -- seeded Gaussian noise contaminates
  only the observers' measured copy of u, sampled once per step and held
  within the step so the composite stays an ODE.  The plant input is
  clean: this isolates observer noise sensitivity.
* ``parasitic_input`` -- the commanded signal v feeds a first-order lag
  tau*u' = -u + v whose state drives the plant, while observers measure
  v (unmodelled actuator dynamics).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable

DISTURBANCE_KINDS = (
    "none",
    "constant_on_output",
    "constant_on_input",
    "white_noise_on_measured_input",
    "parasitic_input",
)


@dataclass
class Disturbance:
    kind: str = "none"
    delta: float = 0.0
    sigma: float = 0.01
    tau: float = 1.0

    def __post_init__(self):
        if self.kind not in DISTURBANCE_KINDS:
            raise ValueError(f"unknown disturbance kind {self.kind!r}")
        if self.kind == "parasitic_input" and self.tau <= 0.0:
            raise ValueError("parasitic time constant must be positive")


@dataclass
class ObserverSpec:
    """An observer plus the plant-truth accessor it is graded against.

    ``truth(plant, x)`` must return a tuple aligned with the observer's
    ``est_names``."""

    name: str
    observer: object
    truth: Callable[[object, list[float]], tuple]


@dataclass
class Scenario:
    plant: object
    observers: list[ObserverSpec]
    input_fn: Callable[[float], tuple] | None = None
    controller: object | None = None
    load: Callable[[float], float] | None = None
    disturbance: Disturbance = field(default_factory=Disturbance)
    x0: tuple | None = None
    dt: float = 1e-4
    t_end: float = 1.0
    decimate: int = 1
    seed: int = 0
    seed_filter_ics: bool = False
    record_w: bool = False
    label: str = ""

    def validate(self) -> None:
        if self.dt <= 0.0:
            raise ValueError("dt must be positive")
        if self.t_end <= self.dt:
            raise ValueError("t_end must exceed dt")
        if self.decimate < 1:
            raise ValueError("decimate must be >= 1")
        if (self.input_fn is None) == (self.controller is None):
            raise ValueError("exactly one of input_fn or controller is required")
        names = [o.name for o in self.observers]
        if len(set(names)) != len(names):
            raise ValueError("observer names must be unique")
        rates = []
        for spec in self.observers:
            rates.extend(getattr(spec.observer, "rates", tuple)())
        if rates:
            fastest = max(rates)
            if self.dt > 1.0 / (10.0 * fastest):
                warnings.warn(
                    f"dt={self.dt:g} exceeds 1/(10*rate) for the fastest observer "
                    f"rate {fastest:g}; transients may be under-resolved",
                    stacklevel=2,
                )

    @property
    def nsteps(self) -> int:
        n = round(self.t_end / self.dt)
        if abs(n * self.dt - self.t_end) > 1e-9 * max(1.0, self.t_end):
            raise ValueError("t_end must be an integer multiple of dt")
        return n
