"""plotview: render error-trace figures from simulation CSV files.

Consumes only the documented trace.csv schema (header "t,<channel>,...",
one float row per sample) plus a flat key-value figure-spec grammar; it
has no coupling to the simulator that produced the files.
"""

__version__ = "0.1.0"

from .render import MissingChannel, render
from .spec import FigureSpec, SeriesSpec, SpecError, parse_figure_spec

__all__ = [
    "FigureSpec",
    "MissingChannel",
    "SeriesSpec",
    "SpecError",
    "parse_figure_spec",
    "render",
    "__version__",
]
