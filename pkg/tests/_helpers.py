"""Shared test utilities: tiny co-simulation harnesses and signal makers."""

from __future__ import annotations

import math

import numpy as np

from aslo_lab.simkit.integrate import rk4_step


def cosim(deriv, s0, dt, t_end, sample_every=1, t0=0.0):
    """Integrate deriv(t, s)->list with RK4; return (times, states) at the
    sampling stride, including both endpoints."""
    n = round((t_end - t0) / dt)
    s = list(s0)
    ts, hist = [t0], [list(s)]
    for k in range(n):
        s = rk4_step(deriv, t0 + k * dt, s, dt)
        if (k + 1) % sample_every == 0:
            ts.append(t0 + (k + 1) * dt)
            hist.append(list(s))
    return ts, hist


def sum_of_sines(rng, k=3, amp=(0.3, 1.0), freq=(0.2, 4.0)):
    """Band-limited random signal: returns (f, fdot) closures."""
    a = rng.uniform(*amp, size=k)
    w = rng.uniform(*freq, size=k)
    ph = rng.uniform(0.0, 2.0 * math.pi, size=k)

    def f(t):
        return float(sum(ai * math.sin(wi * t + pi) for ai, wi, pi in zip(a, w, ph)))

    def fdot(t):
        return float(sum(ai * wi * math.cos(wi * t + pi) for ai, wi, pi in zip(a, w, ph)))

    return f, fdot


def max_abs(values):
    return max(abs(v) for v in values)


def column_after(trace, channel, t_from):
    return [v for t, v in zip(trace.t, trace.column(channel)) if t >= t_from]


def rng_for(seed):
    return np.random.default_rng(seed)
