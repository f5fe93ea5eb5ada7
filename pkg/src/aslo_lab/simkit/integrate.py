"""Classical fixed-step 4th-order Runge-Kutta over plain float lists.

Fixed step keeps runs bitwise reproducible and keeps discretization error
identical across compared observers; adaptive stepping is deliberately
out of scope.  State vectors are plain Python lists -- at the few dozen
states used here that is faster than array round-trips.
"""

from __future__ import annotations

from typing import Callable

Deriv = Callable[[float, list[float]], list[float]]


def rk4_step(f: Deriv, t: float, s: list[float], dt: float) -> list[float]:
    """One classical Runge-Kutta step from (t, s) to t + dt."""
    k1 = f(t, s)
    h = 0.5 * dt
    s1 = [si + h * ki for si, ki in zip(s, k1)]
    k2 = f(t + h, s1)
    s2 = [si + h * ki for si, ki in zip(s, k2)]
    k3 = f(t + h, s2)
    s3 = [si + dt * ki for si, ki in zip(s, k3)]
    k4 = f(t + dt, s3)
    w = dt / 6.0
    return [
        si + w * (a + 2.0 * (b + c) + d)
        for si, a, b, c, d in zip(s, k1, k2, k3, k4)
    ]


def integrate(f: Deriv, s0: list[float], dt: float, nsteps: int,
              t0: float = 0.0, observe=None) -> list[float]:
    """Run ``nsteps`` RK4 steps; ``observe(k, t, s)`` is called after each,
    and once with k = 0 before the first."""
    s = list(s0)
    if observe is not None:
        observe(0, t0, s)
    for k in range(nsteps):
        s = rk4_step(f, t0 + k * dt, s, dt)
        if observe is not None:
            observe(k + 1, t0 + (k + 1) * dt, s)
    return s
