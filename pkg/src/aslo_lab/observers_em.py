"""Flux observers for the two electric machines.

Both machines satisfy, along every trajectory, a *measurable* linear
relation in the unknown flux: squaring the current/flux output map
eliminates the rotor angle and leaves

    y1*phi1 + y2*phi2 = |phi|^2/(2*L) + z3,

with z3 built from measured currents only.  Filtering this relation and
swapping the filter off the products (legitimate because phi' = z is
measurable -- Faraday's law) produces a second relation whose quadratic
term cancels against the first; one more filter-and-swap pass yields the
2x2 linear system

    [w4 w5; w7 w8] * phi = [w6; w9],     Delta = w4*w8 - w5*w7,

solved algebraically whenever |Delta| clears a singularity threshold.
No observability or excitation condition enters the construction; the
threshold only guards the division, and held samples are flagged and
counted so users can see when the generic Delta != 0 assumption fails.

Observers provided: the algebraic solve itself (:class:`PmsmAslo`,
:class:`WrimAslo`, per rotor/stator branch for the wound-rotor machine),
gain-tunable asymptotic versions driving phi_hat through Faraday's law
plus a correction toward the solve (:class:`PmsmAaslo`,
:class:`WrimAaslo`), and three comparison observers from the sensorless
literature (:class:`Fo1Observer` gradient flux estimator,
:class:`Fo2Observer` flux-norm projection observer, :class:`Fo3Observer`
determinant-weighted variant that avoids the division entirely).
"""

from __future__ import annotations

import math

from .lti_core import filter_deriv, p_from_state

_W_NAMES = ("w4", "w5", "w6", "w7", "w8", "w9")


def pmsm_measured_signals(R: float, L: float, lam_m: float, u, y):
    """(z1, z2, z3) from machine parameters and measured (u, y).

    (z1, z2) equals the flux derivative (Faraday's law minus resistive
    drop); z3 carries the squared-output data.
    """
    z1 = -R * y[0] + u[0]
    z2 = -R * y[1] + u[1]
    z3 = -lam_m * lam_m / (2.0 * L) + 0.5 * L * (y[0] * y[0] + y[1] * y[1])
    return z1, z2, z3


class _BranchBank:
    """Filter bank + solve bookkeeping for one flux branch.

    Fourteen first-order sections driven by (y1, y2, z1, z2, z3); the
    state order is

        0 F[y1]   1 F[y2]   2 F[z1]   3 F[z2]   4 F[z3]
        5 F[z1 F[y1]]   6 F[z2 F[y2]]   7 F[z1 F[z1]]   8 F[z2 F[z2]]
        9 F[w4]  10 F[w5]  11 F[w6]  12 F[z1 F[w4]]  13 F[z2 F[w5]]

    ``delta_eps=None`` selects the adaptive threshold 1e-6 times the
    running RMS of the determinant's two products, accumulated once per
    completed step; a float pins the threshold.  When |Delta| fails to
    clear the threshold the solve reports the last valid estimate and
    flags the sample.

    Before ``warmup`` seconds (default 3/lam) the solve is held
    unconditionally: with zero initial filter states the two relations
    start exactly parallel (Delta(0) = 0) and their right-hand sides are
    dominated by the decaying initial-condition transient, so early
    "solutions" are pure transient ratio noise no determinant threshold
    can screen.  Warmup holds are reported through the held flag but are
    not counted in the singularity statistics, which describe genuine
    Delta collapses after the filters have settled.
    """

    NSTATES = 14

    def __init__(self, lam: float, l_scale: float, delta_eps: float | None = None,
                 warmup: float | None = None):
        if not (lam > 0.0 and l_scale > 0.0):
            raise ValueError("lam and inductance scale must be positive")
        self.lam = lam
        self.l_scale = l_scale
        self.delta_eps = delta_eps
        self.warmup = 3.0 / lam if warmup is None else warmup
        self.reset()

    def reset(self) -> None:
        self._ssq = 0.0
        self._n = 0
        self._held = 0
        self._samples = 0
        self._last = (0.0, 0.0)

    def threshold(self) -> float:
        if self.delta_eps is not None:
            return self.delta_eps
        if self._n == 0:
            return 0.0
        return 1e-6 * math.sqrt(self._ssq / self._n)

    def deriv(self, s, y1, y2, z1, z2, z3) -> list[float]:
        lam = self.lam
        w4, w5, w6, _, _, _, _ = self.signals(s, y1, y2, z1, z2, z3)
        return [
            filter_deriv(lam, s[0], y1),
            filter_deriv(lam, s[1], y2),
            filter_deriv(lam, s[2], z1),
            filter_deriv(lam, s[3], z2),
            filter_deriv(lam, s[4], z3),
            filter_deriv(lam, s[5], z1 * s[0]),
            filter_deriv(lam, s[6], z2 * s[1]),
            filter_deriv(lam, s[7], z1 * s[2]),
            filter_deriv(lam, s[8], z2 * s[3]),
            filter_deriv(lam, s[9], w4),
            filter_deriv(lam, s[10], w5),
            filter_deriv(lam, s[11], w6),
            filter_deriv(lam, s[12], z1 * s[9]),
            filter_deriv(lam, s[13], z2 * s[10]),
        ]

    def signals(self, s, y1, y2, z1, z2, z3):
        """(w4, w5, w6, w7, w8, w9, delta); delta recomputed every call."""
        lam = self.lam
        ll = lam * self.l_scale
        w4 = s[0] + s[2] / ll - y1
        w5 = s[1] + s[3] / ll - y2
        w6 = (s[5] + s[6] + (s[7] + s[8]) / ll) / lam + s[4] - z3
        w7 = s[9]
        w8 = s[10]
        w9 = s[11] + (s[12] + s[13]) / lam
        return w4, w5, w6, w7, w8, w9, w4 * w8 - w5 * w7

    def signals_direct(self, s, y1, y2, z1, z2, z3):
        """Same signals through the band-limited-derivative route
        (w4 = -(1/lam)*pF[y1] + F[z1]/(lam*L) etc.); algebraically
        identical to :meth:`signals` and kept for the equivalence test."""
        lam = self.lam
        ll = lam * self.l_scale
        w4 = -p_from_state(lam, s[0], y1) / lam + s[2] / ll
        w5 = -p_from_state(lam, s[1], y2) / lam + s[3] / ll
        w6 = (s[5] + s[6]) / lam + (s[7] + s[8]) / (lam * ll) \
            - p_from_state(lam, s[4], z3) / lam
        w7 = s[9]
        w8 = s[10]
        w9 = s[11] + (s[12] + s[13]) / lam
        return w4, w5, w6, w7, w8, w9, w4 * w8 - w5 * w7

    def solve(self, sig, t: float):
        """(phi1, phi2, delta, live) -- held estimates reuse the last
        valid solution and report live=False."""
        w4, w5, w6, w7, w8, w9, delta = sig
        if t >= self.warmup and abs(delta) > self.threshold():
            return ((w6 * w8 - w5 * w9) / delta, (w4 * w9 - w6 * w7) / delta, delta, True)
        return (self._last[0], self._last[1], delta, False)

    def update(self, sig, t: float) -> None:
        """Once-per-step bookkeeping: RMS accumulator, hold level, counts."""
        w4, w5, _, w7, w8, _, delta = sig
        phi1, phi2, _, live = self.solve(sig, t)
        a = w4 * w8
        b = w5 * w7
        self._ssq += a * a + b * b
        self._n += 2
        if t >= self.warmup:
            self._samples += 1
            if live:
                self._last = (phi1, phi2)
            else:
                self._held += 1

    def held_fraction(self) -> float:
        return self._held / self._samples if self._samples else 0.0

    def seed(self, s, y1, y2, z1, z2, z3) -> None:
        """Seed every section to its input's initial value (shrinks the
        startup transient; the asymptotic identity is unaffected)."""
        s[0], s[1], s[2], s[3], s[4] = y1, y2, z1, z2, z3
        s[5], s[6] = z1 * s[0], z2 * s[1]
        s[7], s[8] = z1 * s[2], z2 * s[3]
        w4, w5, w6, _, _, _, _ = self.signals(s, y1, y2, z1, z2, z3)
        s[9], s[10], s[11] = w4, w5, w6
        s[12], s[13] = z1 * s[9], z2 * s[10]


class PmsmAslo:
    """Algebraic flux solve for the surface-magnet machine."""

    est_names = ("phihat1", "phihat2")
    diag_names = ("delta", "held")
    w_names = _W_NAMES
    nstates = _BranchBank.NSTATES

    def __init__(self, lam: float, R: float, L: float, lam_m: float,
                 delta_eps: float | None = None, warmup: float | None = None):
        self.R, self.L, self.lam_m = R, L, lam_m
        self.lam = lam
        self.bank = _BranchBank(lam, L, delta_eps, warmup)

    def _zs(self, u, y):
        return pmsm_measured_signals(self.R, self.L, self.lam_m, u, y)

    def init_state(self) -> list[float]:
        return [0.0] * self.nstates

    def seed_state(self, s, u, y) -> None:
        z1, z2, z3 = self._zs(u, y)
        self.bank.seed(s, y[0], y[1], z1, z2, z3)

    def reset(self) -> None:
        self.bank.reset()

    def deriv(self, t, s, u, y) -> list[float]:
        z1, z2, z3 = self._zs(u, y)
        return self.bank.deriv(s, y[0], y[1], z1, z2, z3)

    def _sig(self, s, u, y):
        z1, z2, z3 = self._zs(u, y)
        return self.bank.signals(s, y[0], y[1], z1, z2, z3)

    def outputs(self, t, s, u, y):
        phi1, phi2, _, _ = self.bank.solve(self._sig(s, u, y), t)
        return (phi1, phi2)

    def diag(self, t, s, u, y):
        _, _, delta, live = self.bank.solve(self._sig(s, u, y), t)
        return (delta, 0.0 if live else 1.0)

    def w_values(self, t, s, u, y):
        return self._sig(s, u, y)[:6]

    def post_step(self, t, s, u, y) -> None:
        self.bank.update(self._sig(s, u, y), t)

    def held_fraction(self) -> float:
        return self.bank.held_fraction()

    def rates(self) -> tuple[float, ...]:
        return (self.lam,)


class PmsmAaslo(PmsmAslo):
    """Asymptotic flux observer: phi_hat' = z - gamma*phi_hat + gamma*solve.

    With exact bank signals the error obeys e' = -gamma*e.  While the
    solve is held the correction is dropped and phi_hat propagates on
    phi' = z alone, which is exact."""

    nstates = _BranchBank.NSTATES + 2

    def __init__(self, lam: float, gamma: float, R: float, L: float, lam_m: float,
                 delta_eps: float | None = None, warmup: float | None = None):
        super().__init__(lam, R, L, lam_m, delta_eps, warmup)
        if gamma < 0.0:
            raise ValueError("gamma must be non-negative (0 = open-loop integration)")
        self.gamma = gamma

    def deriv(self, t, s, u, y) -> list[float]:
        z1, z2, z3 = self._zs(u, y)
        bank = self.bank
        ds = bank.deriv(s, y[0], y[1], z1, z2, z3)
        sol1, sol2, _, live = bank.solve(bank.signals(s, y[0], y[1], z1, z2, z3), t)
        g = self.gamma
        if live:
            ds.append(z1 - g * s[14] + g * sol1)
            ds.append(z2 - g * s[15] + g * sol2)
        else:
            ds.append(z1)
            ds.append(z2)
        return ds

    def outputs(self, t, s, u, y):
        return (s[14], s[15])

    def rates(self) -> tuple[float, ...]:
        return (self.lam, self.gamma)


class Fo3Observer(PmsmAaslo):
    """Determinant-weighted variant: the correction is scaled by Delta
    times the adjugate right-hand side, so no division ever occurs and
    the error law becomes e' = -gamma*Delta^2*e (monotone, singularity
    free, but stalls wherever Delta does)."""

    def deriv(self, t, s, u, y) -> list[float]:
        z1, z2, z3 = self._zs(u, y)
        bank = self.bank
        ds = bank.deriv(s, y[0], y[1], z1, z2, z3)
        w4, w5, w6, w7, w8, w9, delta = bank.signals(s, y[0], y[1], z1, z2, z3)
        g = self.gamma
        ds.append(z1 + g * delta * (w6 * w8 - w5 * w9 - delta * s[14]))
        ds.append(z2 + g * delta * (w4 * w9 - w6 * w7 - delta * s[15]))
        return ds


class Fo1Observer:
    """Gradient flux estimator built on open integrals of (v, i).

    Integrates voltage and current, forms the angle-free regressor pair
    and estimates the constant unknown (the initial flux) by a normalized
    gradient law.  The raw integrators drift without bound in long runs;
    keep runs at desk scale (<= 60 s).

    State order: [int v1, int v2, int i1, int i2, xi5, xi6, xi7, eta1, eta2].
    """

    nstates = 9
    est_names = ("phihat1", "phihat2")

    def __init__(self, lam: float, gamma: float, R: float, L: float):
        if not (lam > 0.0 and gamma > 0.0):
            raise ValueError("lam and gamma must be positive")
        self.lam, self.gamma = lam, gamma
        self.R, self.L = R, L

    def init_state(self) -> list[float]:
        return [0.0] * 9

    def _core(self, s, u, y):
        q1 = s[0] - self.R * s[2] - self.L * y[0]
        q2 = s[1] - self.R * s[3] - self.L * y[1]
        qsq = q1 * q1 + q2 * q2
        om1 = self.lam * (2.0 * q1 - s[5])
        om2 = self.lam * (2.0 * q2 - s[6])
        y_sc = -self.lam * (qsq + s[4])
        return q1, q2, qsq, om1, om2, y_sc

    def deriv(self, t, s, u, y) -> list[float]:
        lam, g = self.lam, self.gamma
        q1, q2, qsq, om1, om2, y_sc = self._core(s, u, y)
        resid = y_sc - (om1 * s[7] + om2 * s[8])
        return [
            u[0],
            u[1],
            y[0],
            y[1],
            -lam * (s[4] + qsq),
            -lam * (s[5] - 2.0 * q1),
            -lam * (s[6] - 2.0 * q2),
            g * om1 * resid,
            g * om2 * resid,
        ]

    def outputs(self, t, s, u, y):
        q1, q2, _, _, _, _ = self._core(s, u, y)
        return (self.L * y[0] + q1 + s[7], self.L * y[1] + q2 + s[8])

    def rates(self) -> tuple[float, ...]:
        return (self.lam, self.gamma)


class Fo2Observer:
    """Flux-norm projection observer.

    Open-loop Faraday integration corrected by the gradient of
    max(0, |phi_hat - L*i|^2 - lam_m^2): active only when the estimate
    leaves the known flux-norm sphere, hence the extra requirement that
    the magnet flux constant is known.  Typically needs a very large gain
    to be competitive."""

    nstates = 2
    est_names = ("phihat1", "phihat2")

    def __init__(self, gamma: float, R: float, L: float, lam_m: float):
        if not (gamma > 0.0):
            raise ValueError("gamma must be positive")
        self.gamma = gamma
        self.R, self.L, self.lam_m = R, L, lam_m

    def init_state(self) -> list[float]:
        return [0.0, 0.0]

    def deriv(self, t, s, u, y) -> list[float]:
        e1 = s[0] - self.L * y[0]
        e2 = s[1] - self.L * y[1]
        h = e1 * e1 + e2 * e2 - self.lam_m * self.lam_m
        gate = h if h > 0.0 else 0.0
        return [
            u[0] - self.R * y[0] - self.gamma * e1 * gate,
            u[1] - self.R * y[1] - self.gamma * e2 * gate,
        ]

    def outputs(self, t, s, u, y):
        return (s[0], s[1])

    def rates(self) -> tuple[float, ...]:
        return (self.gamma,)


# ---------------------------------------------------------------------------
# Wound-rotor induction machine (per-branch solves)
# ---------------------------------------------------------------------------


def wrim_branch_signals(plant, branch: str, u, y):
    """(y1, y2, z1, z2, z3) for one flux branch of the wound-rotor machine.

    Stator: z = -Rs*is + u.  Rotor (short-circuited through slip rings):
    z = -Rr*ir.  The quadratic data z3 uses the branch's own inductance,
    matching the branch identity phi_k . y_k = |phi_k|^2/(2*L_k) + z3_k.
    """
    is1, is2, ir1, ir2 = y
    ssq = is1 * is1 + is2 * is2
    rsq = ir1 * ir1 + ir2 * ir2
    if branch == "s":
        z3 = 0.5 * plant.Ls * ssq - plant.Lsr ** 2 / (2.0 * plant.Ls) * rsq
        return is1, is2, -plant.Rs * is1 + u[0], -plant.Rs * is2 + u[1], z3
    z3 = 0.5 * plant.Lr * rsq - plant.Lsr ** 2 / (2.0 * plant.Lr) * ssq
    return ir1, ir2, -plant.Rr * ir1, -plant.Rr * ir2, z3


class WrimAslo:
    """Per-branch algebraic flux solve for stator and rotor.

    The two branches are structurally the PMSM bank instantiated with the
    branch currents, the branch measurable flux derivative, and the
    branch self-inductance; each carries its own determinant and hold
    bookkeeping.
    """

    est_names = ("phihat_s1", "phihat_s2", "phihat_r1", "phihat_r2")
    diag_names = ("delta_s", "held_s", "delta_r", "held_r")
    w_names = tuple(f"ws{i}" for i in range(4, 10)) + tuple(f"wr{i}" for i in range(4, 10))
    nstates = 2 * _BranchBank.NSTATES

    def __init__(self, lam: float, plant, delta_eps: float | None = None,
                 warmup: float | None = None):
        self.lam = lam
        self.plant = plant
        self.banks = {
            "s": _BranchBank(lam, plant.Ls, delta_eps, warmup),
            "r": _BranchBank(lam, plant.Lr, delta_eps, warmup),
        }

    def init_state(self) -> list[float]:
        return [0.0] * self.nstates

    def reset(self) -> None:
        for bank in self.banks.values():
            bank.reset()

    def _split(self, s):
        n = _BranchBank.NSTATES
        return s[:n], s[n:2 * n]

    def deriv(self, t, s, u, y) -> list[float]:
        ss, sr = self._split(s)
        ds = self.banks["s"].deriv(ss, *wrim_branch_signals(self.plant, "s", u, y))
        ds += self.banks["r"].deriv(sr, *wrim_branch_signals(self.plant, "r", u, y))
        return ds

    def _sigs(self, s, u, y):
        ss, sr = self._split(s)
        return (
            self.banks["s"].signals(ss, *wrim_branch_signals(self.plant, "s", u, y)),
            self.banks["r"].signals(sr, *wrim_branch_signals(self.plant, "r", u, y)),
        )

    def outputs(self, t, s, u, y):
        sig_s, sig_r = self._sigs(s, u, y)
        ps1, ps2, _, _ = self.banks["s"].solve(sig_s, t)
        pr1, pr2, _, _ = self.banks["r"].solve(sig_r, t)
        return (ps1, ps2, pr1, pr2)

    def diag(self, t, s, u, y):
        sig_s, sig_r = self._sigs(s, u, y)
        _, _, d_s, live_s = self.banks["s"].solve(sig_s, t)
        _, _, d_r, live_r = self.banks["r"].solve(sig_r, t)
        return (d_s, 0.0 if live_s else 1.0, d_r, 0.0 if live_r else 1.0)

    def w_values(self, t, s, u, y):
        sig_s, sig_r = self._sigs(s, u, y)
        return sig_s[:6] + sig_r[:6]

    def post_step(self, t, s, u, y) -> None:
        sig_s, sig_r = self._sigs(s, u, y)
        self.banks["s"].update(sig_s, t)
        self.banks["r"].update(sig_r, t)

    def held_fraction(self) -> float:
        return max(b.held_fraction() for b in self.banks.values())

    def rates(self) -> tuple[float, ...]:
        return (self.lam,)


class WrimAaslo(WrimAslo):
    """Per-branch asymptotic flux observers with branch gains.

    Error law e_k' = -gamma_k * e_k per branch; under a held solve the
    branch propagates on its exact flux derivative alone."""

    nstates = 2 * _BranchBank.NSTATES + 4

    def __init__(self, lam: float, gamma_s: float, gamma_r: float, plant,
                 delta_eps: float | None = None, warmup: float | None = None):
        super().__init__(lam, plant, delta_eps, warmup)
        if gamma_s < 0.0 or gamma_r < 0.0:
            raise ValueError("branch gains must be non-negative")
        self.gamma_s, self.gamma_r = gamma_s, gamma_r

    def deriv(self, t, s, u, y) -> list[float]:
        ds = super().deriv(t, s, u, y)
        n = 2 * _BranchBank.NSTATES
        sig_s, sig_r = self._sigs(s, u, y)
        for idx, (branch, sig, gamma) in enumerate(
            (("s", sig_s, self.gamma_s), ("r", sig_r, self.gamma_r))
        ):
            _, _, z1, z2, _ = wrim_branch_signals(self.plant, branch, u, y)
            sol1, sol2, _, live = self.banks[branch].solve(sig, t)
            p1 = s[n + 2 * idx]
            p2 = s[n + 2 * idx + 1]
            if live:
                ds.append(z1 - gamma * p1 + gamma * sol1)
                ds.append(z2 - gamma * p2 + gamma * sol2)
            else:
                ds.append(z1)
                ds.append(z2)
        return ds

    def outputs(self, t, s, u, y):
        n = 2 * _BranchBank.NSTATES
        return (s[n], s[n + 1], s[n + 2], s[n + 3])

    def rates(self) -> tuple[float, ...]:
        return (self.lam, self.gamma_s, self.gamma_r)
