"""Trace post-processing: decay-rate fits and summary metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .runner import Trace


@dataclass(frozen=True)
class DecayFit:
    """Least-squares fit of ln|e| = c - rate*t over a window."""

    rate: float
    r2: float
    npoints: int


def fit_decay_rate(trace: Trace, channel: str, window: tuple[float, float],
                   floor: float = 1e-300) -> DecayFit:
    """Fitted exponential decay rate of |channel| over t in [t0, t1].

    Returns rate = -slope of the ln|e| regression (positive for decaying
    signals) with the fit's coefficient of determination.  Samples at or
    below ``floor`` are dropped; fewer than 3 usable points gives NaN.
    """
    t0, t1 = window
    xs, ys = [], []
    for t, v in zip(trace.t, trace.column(channel)):
        if t0 <= t <= t1 and abs(v) > floor:
            xs.append(t)
            ys.append(math.log(abs(v)))
    n = len(xs)
    if n < 3:
        return DecayFit(float("nan"), 0.0, n)
    mx = sum(xs) / n
    my = sum(ys) / n
    sxx = sum((x - mx) ** 2 for x in xs)
    if sxx == 0.0:
        return DecayFit(float("nan"), 0.0, n)
    sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    slope = sxy / sxx
    syy = sum((y - my) ** 2 for y in ys)
    if syy == 0.0:
        # Perfectly flat channel: zero rate, perfect fit.
        return DecayFit(-slope, 1.0, n)
    ss_res = sum((y - (my + slope * (x - mx))) ** 2 for x, y in zip(xs, ys))
    return DecayFit(-slope, 1.0 - ss_res / syy, n)


def settling_time(t: list[float], e: list[float], band: float = 1e-3) -> float:
    """Earliest time after which |e| stays inside +/-band; NaN if never."""
    idx = None
    for i in range(len(e) - 1, -1, -1):
        if abs(e[i]) > band:
            idx = i
            break
    if idx is None:
        return t[0]
    if idx == len(e) - 1:
        return float("nan")
    return t[idx + 1]


def metrics(trace: Trace, band: float = 1e-3) -> dict:
    """Summary metrics per channel plus per-observer held fractions.

    rmse is computed over the final 20% of the samples; settling time is
    with respect to the +/-band window (meaningful for error channels);
    peak is max |value| over the whole trace.
    """
    n = len(trace.t)
    tail = max(1, int(math.ceil(0.8 * n)))
    out: dict = {"channels": {}, "held_fraction": dict(trace.meta.get("held_fraction", {}))}
    for ch in trace.channels:
        vals = trace.data[ch]
        tail_vals = vals[tail - 1:] if n > 1 else vals
        rmse = math.sqrt(sum(v * v for v in tail_vals) / len(tail_vals))
        peak = max(abs(v) for v in vals)
        out["channels"][ch] = {
            "rmse_tail": rmse,
            "peak": peak,
            "settle": settling_time(trace.t, vals, band),
        }
    return out
