"""The six benchmark plants: integrator chains, two electric machines in
the stationary two-phase frame, and three Euler-Lagrange mechanical
systems (robotic leg, ball-and-beam, and a user-parameterized class with
block-diagonal inertia).

Plants are immutable parameter bundles; the state vector lives outside
the object and is owned by the simulation.  Every plant implements

    nstates, state_names, m (input width), p (output width),
    init_state(), deriv(t, x, u[, tau_load]), output(x)

plus semantic truth accessors (``velocity``, ``flux``, ``qdot``) used to
grade observers.  Electrical plants take an extra load-torque argument;
load profiles belong to the scenario, not the plant.

Unit conventions: SI throughout (V, A, Wb, ohm, H, kg m^2, N m, rad).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import SingularConfiguration


class DoubleIntegrator:
    """x1' = x2, x2' = u, y = x1."""

    nstates = 2
    state_names = ("x1", "x2")
    m = 1
    p = 1
    has_load = False

    def init_state(self) -> list[float]:
        return [0.0, 0.0]

    def deriv(self, t, x, u) -> list[float]:
        return [x[1], u[0]]

    def output(self, x) -> tuple[float, ...]:
        return (x[0],)

    def velocity(self, x) -> tuple[float, ...]:
        return (x[1],)


class IntegratorChain:
    """n-th order integrator chain: x_i' = x_{i+1}, x_n' = u, y = x1."""

    m = 1
    p = 1
    has_load = False

    def __init__(self, n: int):
        if n < 2:
            raise ValueError("chain order must be >= 2")
        self.n = n
        self.nstates = n
        self.state_names = tuple(f"x{i}" for i in range(1, n + 1))

    def init_state(self) -> list[float]:
        return [0.0] * self.n

    def deriv(self, t, x, u) -> list[float]:
        dx = list(x[1:])
        dx.append(u[0])
        return dx

    def output(self, x) -> tuple[float, ...]:
        return (x[0],)

    def hidden_states(self, x) -> tuple[float, ...]:
        """x2..xn, the states the chain observer reconstructs."""
        return tuple(x[1:])


@dataclass(frozen=True)
class PmsmModel:
    """Non-salient surface-magnet synchronous machine, two-phase frame.

    State: stator flux (phi1, phi2) [Wb], rotor angle theta [rad],
    speed omega [rad/s].  The measured current follows from the flux by
    L*y = phi - lam_m*(cos(np*theta), sin(np*theta)); Faraday's law gives
    phi' = -R*y + u.
    """

    R: float
    L: float
    J: float
    Rm: float
    np_pairs: int
    lam_m: float
    i_max: float = float("inf")  # nameplate limit, informational only

    nstates = 4
    state_names = ("phi1", "phi2", "theta", "omega")
    m = 2
    p = 2
    has_load = True

    def __post_init__(self):
        if min(self.R, self.L, self.J, self.lam_m) <= 0.0 or self.np_pairs < 1:
            raise ValueError("PMSM parameters must be positive (np_pairs >= 1)")

    def init_state(self, theta0: float = 0.0, omega0: float = 0.0) -> list[float]:
        # Zero-current initial flux: phi = lam_m * (cos, sin)(np*theta0).
        a = self.np_pairs * theta0
        return [self.lam_m * math.cos(a), self.lam_m * math.sin(a), theta0, omega0]

    def output(self, x) -> tuple[float, float]:
        a = self.np_pairs * x[2]
        return (
            (x[0] - self.lam_m * math.cos(a)) / self.L,
            (x[1] - self.lam_m * math.sin(a)) / self.L,
        )

    def deriv(self, t, x, u, tau_load: float = 0.0) -> list[float]:
        y1, y2 = self.output(x)
        torque = self.np_pairs * (y2 * x[0] - y1 * x[1])
        return [
            -self.R * y1 + u[0],
            -self.R * y2 + u[1],
            x[3],
            (-self.Rm * x[3] + torque - tau_load) / self.J,
        ]

    def flux(self, x) -> tuple[float, float]:
        return (x[0], x[1])


@dataclass(frozen=True)
class WrimModel:
    """Wound-rotor induction machine, two-phase frame, flux state.

    State: stator flux (2), rotor flux (2), rotor angle, speed.  Currents
    are derived outputs obtained by inverting the winding inductance
    matrix at the current angle; keeping flux as the state keeps
    Faraday's law exact.  Rotor windings are short-circuited through slip
    rings, so rotor currents are measurable and enter the output.
    """

    Rs: float
    Rr: float
    Ls: float
    Lr: float
    Lsr: float
    J: float
    Rm: float

    nstates = 6
    state_names = ("phis1", "phis2", "phir1", "phir2", "theta", "omega")
    m = 2
    p = 4
    has_load = True

    def __post_init__(self):
        if self.Ls * self.Lr <= self.Lsr * self.Lsr:
            raise SingularConfiguration(
                "inductance matrix not positive definite: Ls*Lr must exceed Lsr^2"
            )

    def init_state(self) -> list[float]:
        return [0.0] * 6

    def currents(self, x) -> tuple[float, float, float, float]:
        sigma = self.Ls * self.Lr - self.Lsr * self.Lsr
        c, s = math.cos(x[4]), math.sin(x[4])
        # e^{J theta} * phir and e^{-J theta} * phis
        rp1 = c * x[2] - s * x[3]
        rp2 = s * x[2] + c * x[3]
        sp1 = c * x[0] + s * x[1]
        sp2 = -s * x[0] + c * x[1]
        is1 = (self.Lr * x[0] - self.Lsr * rp1) / sigma
        is2 = (self.Lr * x[1] - self.Lsr * rp2) / sigma
        ir1 = (self.Ls * x[2] - self.Lsr * sp1) / sigma
        ir2 = (self.Ls * x[3] - self.Lsr * sp2) / sigma
        return (is1, is2, ir1, ir2)

    def output(self, x) -> tuple[float, float, float, float]:
        return self.currents(x)

    def deriv(self, t, x, u, tau_load: float = 0.0) -> list[float]:
        is1, is2, ir1, ir2 = self.currents(x)
        torque = is2 * x[0] - is1 * x[1]  # is^T J phis
        return [
            -self.Rs * is1 + u[0],
            -self.Rs * is2 + u[1],
            -self.Rr * ir1,
            -self.Rr * ir2,
            x[5],
            (-self.Rm * x[5] + torque - tau_load) / self.J,
        ]

    def flux(self, x) -> tuple[float, float, float, float]:
        return (x[0], x[1], x[2], x[3])


@dataclass(frozen=True)
class RoboticLegModel:
    """Three-DoF leg: prismatic extension q1, hip angle q2, body angle q3.

        m1*q1'' = m1*q1*q2'^2 + u1
        m1*q1^2*q2'' = -2*m1*q1*q1'*q2' + u2
        m2*q3'' = -u2

    No potential energy, no friction.  The q2 inertia m1*q1^2 vanishes at
    q1 = 0; dynamics raise if |q1| falls below ``q1_min``.
    """

    m1: float
    m2: float
    q1_min: float = 1e-3

    nstates = 6
    state_names = ("q1", "q2", "q3", "qd1", "qd2", "qd3")
    m = 2
    p = 3
    has_load = False

    def init_state(self) -> list[float]:
        return [1.0, 0.0, 0.0, 0.0, 0.0, 0.0]

    def output(self, x) -> tuple[float, float, float]:
        return (x[0], x[1], x[2])

    def deriv(self, t, x, u) -> list[float]:
        q1, qd1, qd2 = x[0], x[3], x[4]
        if abs(q1) < self.q1_min:
            raise SingularConfiguration(f"leg extension |q1|={abs(q1):.2e} below {self.q1_min:g}")
        return [
            x[3],
            x[4],
            x[5],
            q1 * qd2 * qd2 + u[0] / self.m1,
            (-2.0 * self.m1 * q1 * qd1 * qd2 + u[1]) / (self.m1 * q1 * q1),
            -u[1] / self.m2,
        ]

    def qdot(self, x) -> tuple[float, float, float]:
        return (x[3], x[4], x[5])

    def energy(self, x) -> float:
        q1 = x[0]
        return 0.5 * (self.m1 * x[3] ** 2 + self.m1 * q1 * q1 * x[4] ** 2 + self.m2 * x[5] ** 2)


@dataclass(frozen=True)
class BallBeamModel:
    """Ball of unit mass on a pivoting beam.

        q1'' = q1*q2'^2 - g*sin(q2)
        (ell^2 + q1^2)*q2'' = -2*q1*q1'*q2' - g*q1*cos(q2) + u

    q1 is the ball position along the beam, q2 the beam angle.  The model
    is meaningful for |q1| < ell/2; the inertia ell^2 + q1^2 never
    vanishes, so the dynamics themselves are defined everywhere.
    """

    ell: float
    g: float

    nstates = 4
    state_names = ("q1", "q2", "qd1", "qd2")
    m = 1
    p = 2
    has_load = False

    def init_state(self) -> list[float]:
        return [0.0, 0.0, 0.0, 0.0]

    def output(self, x) -> tuple[float, float]:
        return (x[0], x[1])

    def deriv(self, t, x, u) -> list[float]:
        q1, q2, qd1, qd2 = x
        return [
            qd1,
            qd2,
            q1 * qd2 * qd2 - self.g * math.sin(q2),
            (-2.0 * q1 * qd1 * qd2 - self.g * q1 * math.cos(q2) + u[0])
            / (self.ell * self.ell + q1 * q1),
        ]

    def in_domain(self, x) -> bool:
        return abs(x[0]) < 0.5 * self.ell

    def qdot(self, x) -> tuple[float, float]:
        return (x[2], x[3])

    def energy(self, x) -> float:
        q1 = x[0]
        kin = 0.5 * (x[2] ** 2 + (self.ell * self.ell + q1 * q1) * x[3] ** 2)
        return kin + self.g * q1 * math.sin(x[1])


class GenericElPlant:
    """Euler-Lagrange system with inertia diag(m1, m3(q1)), m1 constant.

    Coordinates split as q = (q1 in R^s, q2 in R^m_) with diagonal
    friction R = diag(r1, r2) and potential V(q).  The caller supplies
    closures:

        m3(q1)      -> list of m_ positive diagonal entries
        dm3(q1)     -> m_ x s matrix of partials d m3_j / d q1_i
        grad_v(q1, q2) -> (dV/dq1 list of s, dV/dq2 list of m_)
        gmat(q1, q2)   -> n x n_u input matrix rows (q1 rows then q2 rows)

    The q2 equations reduce to  q2_j'' + zdot_j*q2_j' = z0_j  where
    zdot_j collects the Coriolis ratio plus the friction ratio
    r2_j/m3_j(q1); whether that combination is integrable to a function
    z_j(q1) is the caller's responsibility (the velocity observers take
    z_j as a user-supplied measurable signal and validate its defining
    relation numerically, not symbolically).
    """

    has_load = False

    def __init__(self, s, m_, m1_diag, m3, dm3, grad_v=None, gmat=None,
                 r1=None, r2=None, n_u=None):
        self.s = s
        self.m_ = m_
        self.n = s + m_
        self.m1_diag = [float(v) for v in m1_diag]
        if any(v <= 0.0 for v in self.m1_diag):
            raise ValueError("m1 diagonal entries must be positive")
        self.m3 = m3
        self.dm3 = dm3
        self.grad_v = grad_v or (lambda q1, q2: ([0.0] * s, [0.0] * m_))
        self.n_u = n_u if n_u is not None else self.n
        self.gmat = gmat or (lambda q1, q2: [
            [1.0 if i == j else 0.0 for j in range(self.n_u)] for i in range(self.n)
        ])
        self.r1 = [float(v) for v in (r1 or [0.0] * s)]
        self.r2 = [float(v) for v in (r2 or [0.0] * m_)]
        if any(v < 0.0 for v in self.r2) or any(v < 0.0 for v in self.r1):
            raise ValueError("friction entries must be non-negative")
        self.nstates = 2 * self.n
        self.state_names = tuple(
            [f"q{i+1}" for i in range(self.n)] + [f"qd{i+1}" for i in range(self.n)]
        )
        self.m = self.n_u
        self.p = self.n

    def init_state(self) -> list[float]:
        return [0.0] * self.nstates

    def output(self, x) -> tuple[float, ...]:
        return tuple(x[: self.n])

    def qdot(self, x) -> tuple[float, ...]:
        return tuple(x[self.n:])

    def deriv(self, t, x, u) -> list[float]:
        s, m_ = self.s, self.m_
        q1 = x[:s]
        q2 = x[s:s + m_]
        qd1 = x[self.n:self.n + s]
        qd2 = x[self.n + s:]
        m3v = self.m3(q1)
        if any(v <= 0.0 for v in m3v):
            raise SingularConfiguration("m3(q1) lost positivity")
        dm3v = self.dm3(q1)
        gv1, gv2 = self.grad_v(q1, q2)
        g = self.gmat(q1, q2)

        gu = [sum(g[i][j] * u[j] for j in range(self.n_u)) for i in range(self.n)]

        qdd1 = []
        for i in range(s):
            coriolis = 0.5 * sum(dm3v[j][i] * qd2[j] * qd2[j] for j in range(m_))
            qdd1.append((gu[i] + coriolis - self.r1[i] * qd1[i] - gv1[i]) / self.m1_diag[i])
        qdd2 = []
        for j in range(m_):
            coriolis = sum(dm3v[j][i] * qd1[i] for i in range(s)) * qd2[j]
            qdd2.append((gu[s + j] - coriolis - self.r2[j] * qd2[j] - gv2[j]) / m3v[j])
        return list(qd1) + list(qd2) + qdd1 + qdd2

    def energy(self, x, potential=None) -> float:
        s, m_ = self.s, self.m_
        q1 = x[:s]
        qd1 = x[self.n:self.n + s]
        qd2 = x[self.n + s:]
        m3v = self.m3(q1)
        kin = 0.5 * sum(self.m1_diag[i] * qd1[i] ** 2 for i in range(s))
        kin += 0.5 * sum(m3v[j] * qd2[j] ** 2 for j in range(m_))
        if potential is not None:
            kin += potential(q1, x[s:s + m_])
        return kin


# ---------------------------------------------------------------------------
# Presets
# ---------------------------------------------------------------------------


def pmsm_bmp0701f(Rm: float = 1e-3) -> PmsmModel:
    """2.3 A surface-magnet servo motor (nameplate BMP0701F).

    Electrical parameters from the machine's datasheet values; the
    friction coefficient is not published, so ``Rm`` is a small
    implementer-chosen default.
    """
    return PmsmModel(R=8.875, L=40.03e-3, J=60e-6, Rm=Rm, np_pairs=5,
                     lam_m=0.2086, i_max=2.3)


def wrim_lab() -> WrimModel:
    """Desk-scale wound-rotor machine.

    These values are implementer-chosen plausible constants for a small
    laboratory machine (they are not published data for any specific
    motor) sized so that the shipped excitation preset produces fluxes of
    order 1 Wb and a visibly slipping rotor.
    """
    return WrimModel(Rs=1.8, Rr=1.35, Ls=0.16, Lr=0.16, Lsr=0.145, J=0.05, Rm=0.02)


def leg_default() -> RoboticLegModel:
    return RoboticLegModel(m1=1.0, m2=1.0)


def ballbeam_default() -> BallBeamModel:
    return BallBeamModel(ell=1.0, g=9.81)


def leg_as_generic(model: RoboticLegModel) -> GenericElPlant:
    """The robotic leg expressed through the generic EL class (s=1, m=2)."""
    m1, m2 = model.m1, model.m2
    return GenericElPlant(
        s=1, m_=2,
        m1_diag=[m1],
        m3=lambda q1: [m1 * q1[0] * q1[0], m2],
        dm3=lambda q1: [[2.0 * m1 * q1[0]], [0.0]],
        gmat=lambda q1, q2: [[1.0, 0.0], [0.0, 1.0], [0.0, -1.0]],
        n_u=2,
    )


def ballbeam_as_generic(model: BallBeamModel) -> GenericElPlant:
    """The ball-and-beam expressed through the generic EL class (s=1, m=1)."""
    ell, g = model.ell, model.g
    return GenericElPlant(
        s=1, m_=1,
        m1_diag=[1.0],
        m3=lambda q1: [ell * ell + q1[0] * q1[0]],
        dm3=lambda q1: [[2.0 * q1[0]]],
        grad_v=lambda q1, q2: ([g * math.sin(q2[0])], [g * q1[0] * math.cos(q2[0])]),
        gmat=lambda q1, q2: [[0.0], [1.0]],
        n_u=1,
    )
