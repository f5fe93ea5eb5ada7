"""Closed-loop excitation scaffolds.

These controllers exist to produce realistic, persistently exciting
trajectories for observer evaluation; they intentionally read the true
plant state (angle, speed, positions) from the simulator.  The observers
under test never see controller internals -- only the commanded input and
the plant output -- so feeding the controller privileged state keeps the
excitation simple without touching what is being graded.  Both scaffolds
are documented substitutes for the industrial loops they stand in for.
"""

from __future__ import annotations

import math
from typing import Callable


class PmsmPiController:
    """Cascaded PI speed/current control in the rotor frame.

    Outer loop: speed error -> q-axis current reference (PI, reference
    clamped to ``iq_limit``).  Inner loops: PI per dq axis with standard
    cross-coupling and back-EMF feedforward, using the true rotor angle
    and speed.  The commanded voltage is magnitude-limited to ``vmax``.

    States: [speed-error integral, d-error integral, q-error integral].
    """

    nstates = 3

    def __init__(self, plant, wref: Callable[[float], float],
                 kp_w: float = 0.01, ki_w: float = 0.5,
                 kp_i: float = 32.0, ki_i: float = 7100.0,
                 iq_limit: float = 6.0, vmax: float = 60.0,
                 init_integrals: list[float] | None = None):
        if min(kp_w, ki_w, kp_i, ki_i) <= 0.0:
            raise ValueError("controller gains must be positive")
        self.plant = plant
        self.wref = wref
        self.kp_w, self.ki_w = float(kp_w), float(ki_w)
        self.kp_i, self.ki_i = float(kp_i), float(ki_i)
        self.iq_limit = float(iq_limit)
        self.vmax = float(vmax)
        self.init_integrals = list(init_integrals) if init_integrals else None

    def init_state(self) -> list[float]:
        return list(self.init_integrals) if self.init_integrals else [0.0, 0.0, 0.0]

    def _loops(self, t, s, x):
        plant = self.plant
        y1, y2 = plant.output(x)
        theta_e = plant.np_pairs * x[2]
        omega_e = plant.np_pairs * x[3]
        c, sn = math.cos(theta_e), math.sin(theta_e)
        i_d = c * y1 + sn * y2
        i_q = -sn * y1 + c * y2
        e_w = self.wref(t) - x[3]
        iq_ref = self.kp_w * e_w + self.ki_w * s[0]
        if iq_ref > self.iq_limit:
            iq_ref = self.iq_limit
        elif iq_ref < -self.iq_limit:
            iq_ref = -self.iq_limit
        e_d = -i_d
        e_q = iq_ref - i_q
        v_d = self.kp_i * e_d + self.ki_i * s[1] - omega_e * plant.L * i_q
        v_q = self.kp_i * e_q + self.ki_i * s[2] + omega_e * (plant.L * i_d + plant.lam_m)
        u1 = c * v_d - sn * v_q
        u2 = sn * v_d + c * v_q
        mag = math.hypot(u1, u2)
        if mag > self.vmax:
            scale = self.vmax / mag
            u1 *= scale
            u2 *= scale
        return (u1, u2), (e_w, e_d, e_q)

    def control(self, t, s, x) -> tuple[float, float]:
        return self._loops(t, s, x)[0]

    def deriv(self, t, s, x) -> list[float]:
        return list(self._loops(t, s, x)[1])


def pmsm_steady_start(plant, ctrl: PmsmPiController, t0: float = 0.0):
    """Plant and controller states for operation already in progress.

    Starts the machine rotating at the commanded speed with the q-axis
    current carrying the initial load torque and the PI integrals matched
    so no startup transient occurs (to first order in the profiles'
    variation).  Observing a drive in normal operation is the meaningful
    comparison scenario; starting at standstill under full load produces
    a violent speed excursion that says more about the current loop than
    about any observer.
    """
    w0 = ctrl.wref(t0)
    kt = plant.np_pairs * plant.lam_m
    tau0 = plant.Rm * w0  # controller holds load + friction at t0
    iq0 = tau0 / kt
    x0 = [plant.lam_m, plant.L * iq0, 0.0, w0]
    s0 = [iq0 / ctrl.ki_w, 0.0, plant.R * iq0 / ctrl.ki_i]
    return x0, s0


def pmsm_steady_start_loaded(plant, ctrl: PmsmPiController, tau_load0: float,
                             t0: float = 0.0):
    """As :func:`pmsm_steady_start` with an initial load torque held."""
    w0 = ctrl.wref(t0)
    kt = plant.np_pairs * plant.lam_m
    iq0 = (tau_load0 + plant.Rm * w0) / kt
    x0 = [plant.lam_m, plant.L * iq0, 0.0, w0]
    s0 = [iq0 / ctrl.ki_w, 0.0, plant.R * iq0 / ctrl.ki_i]
    return x0, s0


class BallBeamRegulator:
    """Static full-state ball-position tracker for the ball-and-beam.

    The open-loop plant is unstable (the ball runs off the beam within
    seconds for any appreciable excitation), so sustained runs need a
    stabilizer.  Outer loop: desired beam angle from ball error with
    natural frequency ``wn`` and damping ``zeta``, clamped to
    ``q2_max``.  Inner loop: PD on the beam angle with gravity-torque
    compensation.  Stateless.
    """

    nstates = 0

    def __init__(self, plant, q1ref: Callable[[float], float],
                 wn: float = 1.0, zeta: float = 0.9,
                 kp_beam: float = 30.0, kd_beam: float = 10.0,
                 q2_max: float = 0.35):
        self.plant = plant
        self.q1ref = q1ref
        self.wn, self.zeta = float(wn), float(zeta)
        self.kp_beam, self.kd_beam = float(kp_beam), float(kd_beam)
        self.q2_max = float(q2_max)

    def init_state(self) -> list[float]:
        return []

    def control(self, t, s, x) -> tuple[float]:
        plant = self.plant
        q1, q2, qd1, qd2 = x
        q2_des = (self.wn ** 2 * (q1 - self.q1ref(t)) + 2.0 * self.zeta * self.wn * qd1) / plant.g
        if q2_des > self.q2_max:
            q2_des = self.q2_max
        elif q2_des < -self.q2_max:
            q2_des = -self.q2_max
        inertia = plant.ell ** 2 + q1 * q1
        u = plant.g * q1 * math.cos(q2) + inertia * (
            -self.kp_beam * (q2 - q2_des) - self.kd_beam * qd2
        )
        return (u,)

    def deriv(self, t, s, x) -> list[float]:
        return []
