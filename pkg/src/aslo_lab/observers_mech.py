"""Velocity observers for the mechanical benchmarks.

All three constructions instantiate one primitive.  When a coordinate
satisfies  q'' + zdot*q' = z0  with *measurable* zdot and z0 (the shape
every diagonal-inertia Euler-Lagrange coordinate takes after dividing by
its inertia entry), the integrating factor

    chi := exp(z) * q'     satisfies     chi' = exp(z) * z0,

which is measurable.  Filtering q' = exp(-z)*chi and swapping the filter
onto exp(-z) exposes chi' and yields the algebraic unwind

    q' = [lam*(q - F[q]) + F[chi' * F[exp(-z)]]/lam] / (exp(z)*F[exp(-z)]),

exact up to filter transients.  :class:`ExpFactorAslo` is that primitive;
:class:`RoboticLegAslo` and :class:`BallBeamAslo` are its two concrete
instantiations plus the cascaded reconstruction of the remaining
coordinates, and :class:`MechAaslo` wraps any of them into a gain-tuned
asymptotic observer with error law e' = -gamma*e.

The denominator exp(z)*F[exp(-z)] starts at zero when filters start at
zero; by default the denominator section alone is seeded to its initial
input value (a measurable quantity), which removes the startup division
spike without touching the construction's asymptotics.  Estimates are
held at their last valid value whenever the denominator is below the
singularity threshold, and such samples are flagged.
"""

from __future__ import annotations

import math

from .errors import DegenerateFactor
from .lti_core import filter_deriv, p_from_state


class ExpFactorAslo:
    """Generic single-coordinate velocity unwind.

    States: [F[q], F[exp(-z)], F[chi'*F[exp(-z)]]] with chi' = exp(z)*z0
    supplied by the caller at every evaluation.  ``z`` and ``z0`` must be
    measurable along the trajectory; whether the caller's z is a true
    integral of the Coriolis/friction ratio is validated numerically by
    the caller, never symbolically here.
    """

    nstates = 3

    def __init__(self, lam: float, denom_eps: float = 1e-9):
        if not (lam > 0.0):
            raise ValueError("lam must be positive")
        self.lam = lam
        self.denom_eps = denom_eps

    def init_state(self, q0: float | None = None, z0: float | None = None) -> list[float]:
        """Zero states; pass z0 (the exponent at t=0) to seed the
        denominator section at exp(-z0), and q0 to also null the
        position-filter transient."""
        s = [0.0, 0.0, 0.0]
        if z0 is not None:
            s[1] = math.exp(-z0)
        if q0 is not None:
            s[0] = q0
        return s

    def deriv(self, s, q: float, z: float, chidot: float) -> list[float]:
        lam = self.lam
        return [
            filter_deriv(lam, s[0], q),
            filter_deriv(lam, s[1], math.exp(-z)),
            filter_deriv(lam, s[2], chidot * s[1]),
        ]

    def qdot(self, s, q: float, z: float) -> float:
        """Velocity estimate; raises below the denominator threshold."""
        den = math.exp(z) * s[1]
        if abs(den) < self.denom_eps:
            raise DegenerateFactor(
                f"integrating-factor denominator {den:.3e} below {self.denom_eps:g}"
            )
        return (p_from_state(self.lam, s[0], q) + s[2] / self.lam) / den


def expfactor_qdot(obs: ExpFactorAslo, s, q: float, z: float) -> float:
    """Function form of :meth:`ExpFactorAslo.qdot`."""
    return obs.qdot(s, q, z)


class RoboticLegAslo:
    """Velocity observer for the three-DoF leg from positions and forces.

    The hip coordinate q2 carries the state-dependent inertia m1*q1^2;
    its integrating factor is exp(2*ln q1) = q1^2 and the measurable
    forcing is u2/m1 (so chi = q1^2*q2' is the conserved momentum-like
    signal when u2 = 0).  q3 is a plain double integrator driven by
    -u2/m2, and q1' is reconstructed by a cascade that reuses the q2'
    estimate inside the filtered centrifugal term.

    ``literal_forms=True`` switches to the as-printed variant of the
    construction (denominator z1*F[z1] instead of z1*F[1/z1], and +u2
    forcing on q3); it is kept only for comparison runs -- the default
    derived forms are the ones that track the plant.

    State order: [F[q1], F[q2], F[q3], F[1/z1], F[(u2/m1)*F[1/z1]],
    F[u2], F[q1*qd2^2 + u1/m1], F[z1]].
    """

    nstates = 8
    est_names = ("omhat1", "omhat2", "omhat3")
    diag_names = ("held",)

    def __init__(self, lam: float, m1: float, m2: float, q1_min: float = 1e-3,
                 denom_eps: float = 1e-9, literal_forms: bool = False):
        if not (lam > 0.0 and m1 > 0.0 and m2 > 0.0):
            raise ValueError("lam, m1, m2 must be positive")
        self.lam = lam
        self.m1, self.m2 = m1, m2
        self.q1_min = q1_min
        self.denom_eps = denom_eps
        self.literal_forms = literal_forms
        self.reset()

    def reset(self) -> None:
        self._last_qd2 = 0.0
        self._held = 0
        self._samples = 0

    def init_state(self) -> list[float]:
        return [0.0] * self.nstates

    def seed_denominators(self, s, u, y) -> None:
        z1 = y[0] * y[0]
        s[3] = 1.0 / z1
        s[7] = z1

    def seed_state(self, s, u, y) -> None:
        self.seed_denominators(s, u, y)
        s[0], s[1], s[2] = y[0], y[1], y[2]
        s[4] = (u[1] / self.m1) * s[3]
        s[5] = u[1]

    def _qd2(self, s, u, y):
        """(estimate, live); holds the last valid value when the
        denominator is degenerate."""
        q1, q2 = y[0], y[1]
        z1 = q1 * q1
        den = z1 * (s[7] if self.literal_forms else s[3])
        if abs(den) < self.denom_eps:
            return self._last_qd2, False
        num = p_from_state(self.lam, s[1], q2) + s[4] / self.lam
        return num / den, True

    def qd2_estimate(self, s, u, y) -> float:
        """Hip-rate estimate; raises when degenerate or q1 too small."""
        if abs(y[0]) < self.q1_min:
            raise DegenerateFactor(f"|q1|={abs(y[0]):.2e} below {self.q1_min:g}")
        est, live = self._qd2(s, u, y)
        if not live:
            raise DegenerateFactor("leg denominator below threshold")
        return est

    def deriv(self, t, s, u, y) -> list[float]:
        lam = self.lam
        q1, q2, q3 = y
        z1 = q1 * q1
        qd2, _ = self._qd2(s, u, y)
        return [
            filter_deriv(lam, s[0], q1),
            filter_deriv(lam, s[1], q2),
            filter_deriv(lam, s[2], q3),
            filter_deriv(lam, s[3], 1.0 / z1),
            filter_deriv(lam, s[4], (u[1] / self.m1) * s[3]),
            filter_deriv(lam, s[5], u[1]),
            filter_deriv(lam, s[6], q1 * qd2 * qd2 + u[0] / self.m1),
            filter_deriv(lam, s[7], z1),
        ]

    def outputs(self, t, s, u, y):
        lam = self.lam
        qd2, _ = self._qd2(s, u, y)
        qd1 = p_from_state(lam, s[0], y[0]) + s[6] / lam
        w2 = s[5] / (self.m2 * lam)
        qd3 = p_from_state(lam, s[2], y[2]) + (w2 if self.literal_forms else -w2)
        return (qd1, qd2, qd3)

    def diag(self, t, s, u, y):
        _, live = self._qd2(s, u, y)
        return (0.0 if live else 1.0,)

    def post_step(self, t, s, u, y) -> None:
        est, live = self._qd2(s, u, y)
        self._samples += 1
        if live:
            self._last_qd2 = est
        else:
            self._held += 1

    def held_fraction(self) -> float:
        return self._held / self._samples if self._samples else 0.0

    def rates(self) -> tuple[float, ...]:
        return (self.lam,)


class BallBeamAslo:
    """Velocity observer for the ball-and-beam from positions and torque.

    The beam coordinate q2 carries inertia ell^2 + q1^2; its integrating
    factor is that same quantity, with measurable forcing
    (u - g*q1*cos q2)/(ell^2 + q1^2), so the inner filter is driven by
    w1*(u - g*q1*cos q2) directly.  The ball rate q1' follows by the
    cascade that reuses the q2' estimate in the filtered centrifugal and
    gravity terms.

    State order: [F[q1], F[q2], F[1/z2], F[w1*z1*z2],
    F[q1*qd2^2 - g*sin q2]].
    """

    nstates = 5
    est_names = ("omhat1", "omhat2")
    diag_names = ("held",)

    def __init__(self, lam: float, ell: float, g: float, denom_eps: float = 1e-9):
        if not (lam > 0.0 and ell > 0.0):
            raise ValueError("lam and ell must be positive")
        self.lam = lam
        self.ell, self.g = ell, g
        self.denom_eps = denom_eps
        self.reset()

    def reset(self) -> None:
        self._last_qd2 = 0.0
        self._held = 0
        self._samples = 0

    def init_state(self) -> list[float]:
        return [0.0] * self.nstates

    def seed_denominators(self, s, u, y) -> None:
        s[2] = 1.0 / (self.ell * self.ell + y[0] * y[0])

    def seed_state(self, s, u, y) -> None:
        self.seed_denominators(s, u, y)
        s[0], s[1] = y[0], y[1]

    def _qd2(self, s, u, y):
        z2 = self.ell * self.ell + y[0] * y[0]
        den = s[2] * z2
        if abs(den) < self.denom_eps:
            return self._last_qd2, False
        num = s[3] / self.lam + p_from_state(self.lam, s[1], y[1])
        return num / den, True

    def qd2_estimate(self, s, u, y) -> float:
        est, live = self._qd2(s, u, y)
        if not live:
            raise DegenerateFactor("beam denominator below threshold")
        return est

    def deriv(self, t, s, u, y) -> list[float]:
        lam = self.lam
        q1, q2 = y
        z2 = self.ell * self.ell + q1 * q1
        z1z2 = u[0] - self.g * q1 * math.cos(q2)
        qd2, _ = self._qd2(s, u, y)
        return [
            filter_deriv(lam, s[0], q1),
            filter_deriv(lam, s[1], q2),
            filter_deriv(lam, s[2], 1.0 / z2),
            filter_deriv(lam, s[3], s[2] * z1z2),
            filter_deriv(lam, s[4], q1 * qd2 * qd2 - self.g * math.sin(q2)),
        ]

    def outputs(self, t, s, u, y):
        lam = self.lam
        qd2, _ = self._qd2(s, u, y)
        qd1 = p_from_state(lam, s[0], y[0]) + s[4] / lam
        return (qd1, qd2)

    def diag(self, t, s, u, y):
        _, live = self._qd2(s, u, y)
        return (0.0 if live else 1.0,)

    def post_step(self, t, s, u, y) -> None:
        est, live = self._qd2(s, u, y)
        self._samples += 1
        if live:
            self._last_qd2 = est
        else:
            self._held += 1

    def held_fraction(self) -> float:
        return self._held / self._samples if self._samples else 0.0

    def rates(self) -> tuple[float, ...]:
        return (self.lam,)


def leg_acceleration(m1: float, m2: float):
    """Model acceleration map of the leg, (q, qd, u) -> qdd."""

    def accel(q, qd, u):
        q1 = q[0]
        return (
            q1 * qd[1] * qd[1] + u[0] / m1,
            -2.0 * qd[0] * qd[1] / q1 + u[1] / (m1 * q1 * q1),
            -u[1] / m2,
        )

    return accel


def ballbeam_acceleration(ell: float, g: float):
    """Model acceleration map of the ball-and-beam, (q, qd, u) -> qdd."""

    def accel(q, qd, u):
        q1, q2 = q
        return (
            q1 * qd[1] * qd[1] - g * math.sin(q2),
            (-2.0 * q1 * qd[0] * qd[1] - g * q1 * math.cos(q2) + u[0])
            / (ell * ell + q1 * q1),
        )

    return accel


class MechAaslo:
    """Asymptotic velocity observer wrapping an algebraic one.

    omega_hat' = accel(q, qd_est, u) - gamma*(omega_hat - qd_est), with
    every velocity in the model acceleration replaced by the algebraic
    estimate.  When that estimate is exact the error obeys
    e' = -gamma*e.
    """

    def __init__(self, inner, gamma: float, accel, dof: int):
        if not (gamma > 0.0):
            raise ValueError("gamma must be positive")
        self.inner = inner
        self.gamma = gamma
        self.accel = accel
        self.dof = dof
        self.nstates = inner.nstates + dof
        self.est_names = tuple(f"omhat{i+1}" for i in range(dof))
        self.diag_names = inner.diag_names

    def init_state(self) -> list[float]:
        return self.inner.init_state() + [0.0] * self.dof

    def reset(self) -> None:
        self.inner.reset()

    def seed_denominators(self, s, u, y) -> None:
        sub = s[: self.inner.nstates]
        self.inner.seed_denominators(sub, u, y)
        s[: self.inner.nstates] = sub

    def seed_state(self, s, u, y) -> None:
        sub = s[: self.inner.nstates]
        self.inner.seed_state(sub, u, y)
        s[: self.inner.nstates] = sub

    def deriv(self, t, s, u, y) -> list[float]:
        n = self.inner.nstates
        sub = s[:n]
        ds = self.inner.deriv(t, sub, u, y)
        qd_est = self.inner.outputs(t, sub, u, y)
        acc = self.accel(y, qd_est, u)
        g = self.gamma
        for i in range(self.dof):
            ds.append(acc[i] - g * (s[n + i] - qd_est[i]))
        return ds

    def outputs(self, t, s, u, y):
        return tuple(s[self.inner.nstates:])

    def diag(self, t, s, u, y):
        return self.inner.diag(t, s[: self.inner.nstates], u, y)

    def post_step(self, t, s, u, y) -> None:
        self.inner.post_step(t, s[: self.inner.nstates], u, y)

    def held_fraction(self) -> float:
        return self.inner.held_fraction()

    def rates(self) -> tuple[float, ...]:
        return tuple(self.inner.rates()) + (self.gamma,)


def leg_aaslo(lam: float, gamma: float, m1: float, m2: float, **kw) -> MechAaslo:
    return MechAaslo(RoboticLegAslo(lam, m1, m2, **kw), gamma,
                     leg_acceleration(m1, m2), dof=3)


def ballbeam_aaslo(lam: float, gamma: float, ell: float, g: float, **kw) -> MechAaslo:
    return MechAaslo(BallBeamAslo(lam, ell, g, **kw), gamma,
                     ballbeam_acceleration(ell, g), dof=2)
