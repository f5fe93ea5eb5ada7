"""aslo-lab: algebraic swapping-lemma state observers, simulated.

State observers that reconstruct unmeasured states through *algebraic*
combinations of filtered inputs and outputs (exact up to filter
transients), their gain-tunable asymptotic variants, classical baselines,
and six benchmark plants, all under one deterministic fixed-step
simulation harness with a scenario CLI.
"""

__version__ = "0.1.0"

from . import errors, lti_core, observers_em, observers_linear, observers_mech, plants, simkit

__all__ = [
    "errors",
    "lti_core",
    "observers_em",
    "observers_linear",
    "observers_mech",
    "plants",
    "simkit",
    "__version__",
]
