"""Trace and metrics file writers.

trace.csv schema: header "t,<channel>,...", every numeric cell formatted
"%.12e", comma separated, LF line endings, UTF-8.  The column set is a
pure function of the scenario (plant states, inputs, then per-observer
estimate/error/diagnostic channels in declaration order), so reruns and
sweeps stay column-compatible.
"""

from __future__ import annotations

import math
from pathlib import Path

from ..simkit.metrics import metrics
from ..simkit.runner import Trace


def write_trace_csv(trace: Trace, path: Path) -> None:
    cols = [trace.t] + [trace.data[ch] for ch in trace.channels]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(["t"] + trace.channels) + "\n")
        for i in range(len(trace.t)):
            fh.write(",".join("%.12e" % col[i] for col in cols) + "\n")


def write_metrics(trace: Trace, path: Path) -> None:
    summary = metrics(trace)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("# per-channel metrics: rmse over final 20%, peak |value|, "
                 "settling time into +/-1e-3\n")
        for ch, m in summary["channels"].items():
            settle = m["settle"]
            settle_txt = "never" if math.isnan(settle) else "%.6g" % settle
            fh.write(f"{ch}: rmse_tail={m['rmse_tail']:.6e} peak={m['peak']:.6e} "
                     f"settle={settle_txt}\n")
        for name, frac in summary["held_fraction"].items():
            fh.write(f"{name}: held_fraction={frac:.6e}\n")
