"""Algebraic and asymptotic velocity observers for integrator chains.

For the double integrator  x1' = x2, x2' = u, y = x1  the unmeasured
velocity satisfies the algebraic identity

    x2 = lam*(y - F[y]) + (1/lam)*F[u],      F(p) = lam/(p+lam),

exact for all t up to filter-transient terms that decay like exp(-lam*t).
This module provides that observer in operator form (:class:`DiAslo`) and
in an equivalent explicit state-space form (:class:`DiAsloRealization`),
the gain-tunable asymptotic variants (:class:`DiAaslo`,
:class:`DiAasloRealization`), the classical reduced-order Luenberger
observer (:class:`DiLuenberger`), and the generalization to n-th order
integrator chains (:class:`ChainAslo`).

Chain coefficients are *generated* by exact rational operator algebra
(:func:`derive_chain_coefficients`), never transcribed: the back
substitution is error-prone by hand, and the generated table is guarded by
brute-force truth-tracking tests.

Observer objects follow the block convention used by the simulation
runner: ``nstates``, ``init_state()``, ``deriv(t, s, u, y)``,
``outputs(t, s, u, y)`` and ``est_names``, with ``u``/``y`` passed as
tuples and ``s`` the block's local state list.
"""

from __future__ import annotations

from fractions import Fraction

from .lti_core import filter_deriv, p_from_state

# A Laurent polynomial in the filter rate: {exponent: Fraction}.
LamPoly = dict[int, Fraction]
# Linear combination over signals: keys ("wy", i), ("wu", i), ("x", k).
LinComb = dict[tuple[str, int], LamPoly]


class DiAslo:
    """Velocity observer for the double integrator, operator form.

    States: F[y] and F[u].  Estimate: lam*(y - F[y]) + F[u]/lam.
    """

    nstates = 2
    est_names = ("xhat2",)

    def __init__(self, lam: float):
        if not (lam > 0.0):
            raise ValueError("lam must be positive")
        self.lam = float(lam)

    def init_state(self) -> list[float]:
        return [0.0, 0.0]

    def seed_state(self, s: list[float], u, y) -> None:
        s[0] = y[0]
        s[1] = u[0]

    def deriv(self, t, s, u, y) -> list[float]:
        lam = self.lam
        return [filter_deriv(lam, s[0], y[0]), filter_deriv(lam, s[1], u[0])]

    def outputs(self, t, s, u, y) -> tuple[float, ...]:
        lam = self.lam
        return (p_from_state(lam, s[0], y[0]) + s[1] / lam,)

    def rates(self) -> tuple[float, ...]:
        return (self.lam,)


class DiAsloRealization:
    """Same observer as :class:`DiAslo`, as an explicit state-space system.

        w1' = -lam*w1 + lam*u        (w1 = F[u])
        w2' = -lam*w2 - lam^2*y      (w2 = -lam*F[y])
        xhat2 = w1/lam + w2 + lam*y
    """

    nstates = 2
    est_names = ("xhat2",)

    def __init__(self, lam: float):
        if not (lam > 0.0):
            raise ValueError("lam must be positive")
        self.lam = float(lam)

    def init_state(self) -> list[float]:
        return [0.0, 0.0]

    def deriv(self, t, s, u, y) -> list[float]:
        lam = self.lam
        return [-lam * s[0] + lam * u[0], -lam * s[1] - lam * lam * y[0]]

    def outputs(self, t, s, u, y) -> tuple[float, ...]:
        lam = self.lam
        return (s[0] / lam + s[1] + lam * y[0],)

    def rates(self) -> tuple[float, ...]:
        return (self.lam,)


class DiAaslo:
    """Asymptotic variant: drives xhat2 toward the algebraic estimate.

        xhat2' = u - gamma*(xhat2 - (lam*(y - F[y]) + F[u]/lam))

    With exact filter signals the error obeys e' = -gamma*e.
    """

    nstates = 3
    est_names = ("xhat2",)

    def __init__(self, lam: float, gamma: float):
        if not (lam > 0.0 and gamma > 0.0):
            raise ValueError("lam and gamma must be positive")
        self.lam = float(lam)
        self.gamma = float(gamma)

    def init_state(self) -> list[float]:
        return [0.0, 0.0, 0.0]

    def seed_state(self, s: list[float], u, y) -> None:
        s[0] = y[0]
        s[1] = u[0]

    def algebraic(self, s, u, y) -> float:
        lam = self.lam
        return p_from_state(lam, s[0], y[0]) + s[1] / lam

    def deriv(self, t, s, u, y) -> list[float]:
        lam = self.lam
        return [
            filter_deriv(lam, s[0], y[0]),
            filter_deriv(lam, s[1], u[0]),
            u[0] - self.gamma * (s[2] - self.algebraic(s, u, y)),
        ]

    def outputs(self, t, s, u, y) -> tuple[float, ...]:
        return (s[2],)

    def rates(self) -> tuple[float, ...]:
        return (self.lam, self.gamma)


class DiAasloRealization:
    """State-space form of :class:`DiAaslo`.

        [w1', w2', xh'] = [[-lam,0,0],[0,-lam,0],[g/lam,g,-g]] [w1,w2,xh]
                          + [[lam,0],[0,-lam^2],[1,g*lam]] [u,y]
    """

    nstates = 3
    est_names = ("xhat2",)

    def __init__(self, lam: float, gamma: float):
        if not (lam > 0.0 and gamma > 0.0):
            raise ValueError("lam and gamma must be positive")
        self.lam = float(lam)
        self.gamma = float(gamma)

    def init_state(self) -> list[float]:
        return [0.0, 0.0, 0.0]

    def deriv(self, t, s, u, y) -> list[float]:
        lam, g = self.lam, self.gamma
        w1, w2, xh = s
        return [
            -lam * w1 + lam * u[0],
            -lam * w2 - lam * lam * y[0],
            (g / lam) * w1 + g * w2 - g * xh + u[0] + g * lam * y[0],
        ]

    def outputs(self, t, s, u, y) -> tuple[float, ...]:
        return (s[2],)

    def rates(self) -> tuple[float, ...]:
        return (self.lam, self.gamma)


class DiLuenberger:
    """Reduced-order Luenberger observer, implemented exactly as printed:

        xc' = -gL*xc + u - gL^2*y,    xhat2 = xc + gL*y.

    Error dynamics e' = -gL*e.  Kept loop-for-loop identical to the
    textbook form so performance comparisons against the algebraic
    observers are faithful.
    """

    nstates = 1
    est_names = ("xhat2",)

    def __init__(self, gamma_l: float):
        if not (gamma_l > 0.0):
            raise ValueError("gamma_l must be positive")
        self.gamma_l = float(gamma_l)

    def init_state(self) -> list[float]:
        return [0.0]

    def deriv(self, t, s, u, y) -> list[float]:
        g = self.gamma_l
        return [-g * s[0] + u[0] - g * g * y[0]]

    def outputs(self, t, s, u, y) -> tuple[float, ...]:
        return (s[0] + self.gamma_l * y[0],)

    def rates(self) -> tuple[float, ...]:
        return (self.gamma_l,)


# ---------------------------------------------------------------------------
# n-th order integrator chain
# ---------------------------------------------------------------------------


def _lp_scale(poly: LamPoly, shift: int, factor: Fraction) -> LamPoly:
    return {e + shift: c * factor for e, c in poly.items()}


def _lc_add(acc: LinComb, other: LinComb, shift: int = 0, factor: Fraction = Fraction(1)) -> None:
    for sym, poly in other.items():
        dst = acc.setdefault(sym, {})
        for e, c in poly.items():
            e2 = e + shift
            c2 = dst.get(e2, Fraction(0)) + c * factor
            if c2:
                dst[e2] = c2
            elif e2 in dst:
                del dst[e2]
        if not dst:
            del acc[sym]


class ChainCoefficients:
    """Back-substitution table expressing x_k of an n-integrator chain in
    the filtered signals wy_i = (p/(p+lam))^i [y], wu_i = 1/(p+lam)^i [u].

    ``raw[k]`` may still reference higher states ("x", j), j > k, exactly
    as the back substitution produces them; ``resolved[k]`` is fully
    reduced to wy/wu signals.  Coefficients are exact rationals in integer
    powers of the filter rate.
    """

    def __init__(self, n: int, raw: dict[int, LinComb], resolved: dict[int, LinComb]):
        self.n = n
        self.raw = raw
        self.resolved = resolved

    def resolved_floats(self, lam: float) -> dict[int, dict[tuple[str, int], float]]:
        """Numeric coefficient rows at a concrete filter rate."""
        out: dict[int, dict[tuple[str, int], float]] = {}
        for k, row in self.resolved.items():
            out[k] = {
                sym: float(sum(c * Fraction(1) * (lam ** e) for e, c in poly.items()))
                for sym, poly in row.items()
            }
        return out


def _expand_filtered_state(m: int, j: int, n: int, memo: dict) -> LinComb:
    """Expansion of 1/(p+lam)^m applied to x_j (x_{n+1} := u).

    Uses the trajectory identities (p+lam)[x_j] = x_{j+1} + lam*x_j, i.e.
    G[x_j] = (x_j - G[x_{j+1}])/lam with G = 1/(p+lam).
    """
    key = (m, j)
    if key in memo:
        return memo[key]
    if j == n + 1:
        out: LinComb = {("wu", m): {0: Fraction(1)}}
    elif m == 0:
        out = {("x", j): {0: Fraction(1)}}
    else:
        out = {}
        _lc_add(out, _expand_filtered_state(m - 1, j, n, memo), shift=-1)
        _lc_add(out, _expand_filtered_state(m, j + 1, n, memo), shift=-1, factor=Fraction(-1))
    memo[key] = out
    return out


def derive_chain_coefficients(n: int) -> ChainCoefficients:
    """Generate the observer coefficient table for an n-integrator chain.

    For each k in 2..n the filtered output wy_{k-1} = (p/(p+lam))^{k-1}[y]
    equals 1/(p+lam)^{k-1}[x_k] along trajectories; expanding that with
    the chain recursions and solving for x_k yields one row.  Rows are
    then substituted top-down (x_n first) to eliminate state references.
    """
    if n < 2:
        raise ValueError("chain order must be >= 2")
    memo: dict = {}
    raw: dict[int, LinComb] = {}
    for k in range(2, n + 1):
        expansion = _expand_filtered_state(k - 1, k, n, memo)
        xk_poly = expansion.get(("x", k), {})
        if xk_poly != {-(k - 1): Fraction(1)}:
            raise AssertionError("unexpected pivot in chain expansion")
        row: LinComb = {("wy", k - 1): {0: Fraction(1)}}
        _lc_add(row, {s: p for s, p in expansion.items() if s != ("x", k)},
                factor=Fraction(-1))
        raw[k] = {sym: _lp_scale(poly, k - 1, Fraction(1)) for sym, poly in row.items()}

    resolved: dict[int, LinComb] = {}
    for k in range(n, 1, -1):
        out: LinComb = {}
        for sym, poly in raw[k].items():
            if sym[0] == "x":
                for e, c in poly.items():
                    _lc_add(out, resolved[sym[1]], shift=e, factor=c)
            else:
                _lc_add(out, {sym: poly})
        resolved[k] = out
    return ChainCoefficients(n, raw, resolved)


class ChainAslo:
    """Algebraic observer for all unmeasured states of an n-integrator
    chain (x1' = x2, ..., xn' = u, y = x1).

    Runs two filter cascades -- (p/(p+lam))^i on y and 1/(p+lam)^i on u,
    i = 1..n-1 -- and evaluates the generated coefficient table.
    State layout: [hp_1..hp_{n-1}, lp_1..lp_{n-1}] where hp_i is the
    lowpass section inside highpass stage i and lp_i = F^i[u].
    """

    def __init__(self, n: int, lam: float):
        if n < 2:
            raise ValueError("chain order must be >= 2")
        if not (lam > 0.0):
            raise ValueError("lam must be positive")
        self.n = n
        self.lam = float(lam)
        self.nstates = 2 * (n - 1)
        self.est_names = tuple(f"xhat{k}" for k in range(2, n + 1))
        self.coefficients = derive_chain_coefficients(n)
        rows = self.coefficients.resolved_floats(self.lam)
        # Dense per-row coefficient vectors over (wy_1..wy_{n-1}, wu_1..wu_{n-1}).
        self._cy = []
        self._cu = []
        for k in range(2, n + 1):
            row = rows[k]
            self._cy.append([row.get(("wy", i), 0.0) for i in range(1, n)])
            self._cu.append([row.get(("wu", i), 0.0) for i in range(1, n)])

    def init_state(self) -> list[float]:
        return [0.0] * self.nstates

    def seed_state(self, s: list[float], u, y) -> None:
        # Seeding the first highpass section to y zeroes the startup spike
        # of wy_1; deeper stages then start from zero inputs.
        s[0] = y[0]
        m = self.n - 1
        s[m] = u[0]

    def _signals(self, s, u, y) -> tuple[list[float], list[float]]:
        lam, m = self.lam, self.n - 1
        wy = []
        prev = y[0]
        for i in range(m):
            prev = prev - s[i]
            wy.append(prev)
        wu = []
        scale = 1.0
        for i in range(m):
            scale /= lam
            wu.append(s[m + i] * scale)
        return wy, wu

    def deriv(self, t, s, u, y) -> list[float]:
        lam, m = self.lam, self.n - 1
        ds = [0.0] * (2 * m)
        prev = y[0]
        for i in range(m):
            ds[i] = filter_deriv(lam, s[i], prev)
            prev = prev - s[i]
        prev = u[0]
        for i in range(m):
            ds[m + i] = filter_deriv(lam, s[m + i], prev)
            prev = s[m + i]
        return ds

    def outputs(self, t, s, u, y) -> tuple[float, ...]:
        wy, wu = self._signals(s, u, y)
        est = []
        for cy, cu in zip(self._cy, self._cu):
            acc = 0.0
            for c, v in zip(cy, wy):
                acc += c * v
            for c, v in zip(cu, wu):
                acc += c * v
            est.append(acc)
        return tuple(est)

    def rates(self) -> tuple[float, ...]:
        return (self.lam,)
