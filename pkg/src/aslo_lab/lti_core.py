"""First-order low-pass filter blocks and the product-filter swap identity.

Everything in this library is built out of one atomic unit: the stable
first-order section

    F(p) = lam / (p + lam),   lam > 0,

realized as the scalar ODE  s' = lam * (u - s)  and advanced by an external
integrator.  Three derived constructions live here:

* ``p_filter`` -- the band-limited differentiator lam*p/(p+lam), realized
  exactly as lam*(u - F[u]).  No numerical differentiation anywhere.
* ``FilterChain`` -- cascades realizing (p/(p+lam))^i and 1/(p+lam)^i.
* ``SwapNode`` -- the two filters needed to evaluate the swap identity
  F[w*v] = F[w]*v - F[(1/lam)*F[w]*v_dot], which moves a filter off a
  product and onto one factor, exposing the other factor's derivative.

Blocks are plain mutable state holders with no synchronization; each
simulation owns its blocks exclusively.
"""

from __future__ import annotations

import math

from .errors import NonFiniteSignal


def filter_deriv(lam: float, state: float, u: float) -> float:
    """Time derivative of a first-order section: lam * (u - state)."""
    return lam * (u - state)


def p_from_state(lam: float, state: float, u: float) -> float:
    """Output of lam*p/(p+lam) applied to ``u``, given the section state.

    Identical arithmetic to :func:`filter_deriv`: the defining ODE
    d/dt F[u] = lam*(u - F[u]) *is* the proper realization of p*F.
    """
    return lam * (u - state)


def zoh_step(lam: float, state: float, u: float, dt: float) -> float:
    """Exact discrete step under a zero-order-hold input.

    s+ = exp(-lam*dt)*s + (1 - exp(-lam*dt))*u.  Intended for offline
    post-processing of recorded signals; simulations integrate the filter
    ODE with the same stepper as the plant so discretization error stays
    consistent across blocks.
    """
    a = math.exp(-lam * dt)
    return a * state + (1.0 - a) * u


class FilterBlock:
    """State of one first-order section lam/(p+lam).

    The state approaches F[input] when the block is advanced by an
    integrator using :meth:`derivative`.  Initial state defaults to 0;
    pass ``state`` to seed it (e.g. to the input's initial value, which
    suppresses the startup transient).
    """

    __slots__ = ("lam", "state")

    def __init__(self, lam: float, state: float = 0.0):
        if not (lam > 0.0):
            raise ValueError(f"filter rate must be positive, got {lam!r}")
        self.lam = float(lam)
        self.state = float(state)

    def derivative(self, u: float) -> float:
        """d/dt of the state for input ``u``; raises on non-finite input."""
        if not math.isfinite(u):
            raise NonFiniteSignal(f"non-finite filter input {u!r}")
        return self.lam * (u - self.state)

    def p_output(self, u: float) -> float:
        """lam*p/(p+lam)[u] given the current state (= lam*(u - state))."""
        if not math.isfinite(u):
            raise NonFiniteSignal(f"non-finite filter input {u!r}")
        return self.lam * (u - self.state)

    def zoh_step(self, u: float, dt: float) -> float:
        """Advance the state by the exact zero-order-hold update."""
        self.state = zoh_step(self.lam, self.state, u, dt)
        return self.state


class FilterChain:
    """Cascade of ``n`` identical first-order sections, one shared rate.

    Two tap conventions are provided for input signal x:

    * ``lowpass_outputs`` -- stage i holds F^i[x], so tap i scaled by
      lam**-i realizes 1/(p+lam)^i [x].
    * ``highpass_outputs`` -- stages chained through (1 - F), so tap i
      realizes (p/(p+lam))^i [x].

    All sections share ``lam``; rates per stage are intentionally not
    supported here (each block still stores its own rate field).
    """

    __slots__ = ("sections", "kind")

    def __init__(self, lam: float, n: int, kind: str = "lowpass"):
        if n < 1:
            raise ValueError("chain length must be >= 1")
        if kind not in ("lowpass", "highpass"):
            raise ValueError(f"unknown chain kind {kind!r}")
        self.sections = [FilterBlock(lam) for _ in range(n)]
        self.kind = kind

    def __len__(self) -> int:
        return len(self.sections)

    @property
    def lam(self) -> float:
        return self.sections[0].lam

    def derivatives(self, x: float) -> list[float]:
        """Per-section state derivatives for chain input ``x``."""
        ds = []
        if self.kind == "lowpass":
            prev = x
            for blk in self.sections:
                ds.append(blk.derivative(prev))
                prev = blk.state
        else:
            prev = x
            for blk in self.sections:
                ds.append(blk.derivative(prev))
                prev = prev - blk.state
        return ds

    def advance(self, x: float, dt: float, substeps: int = 1) -> None:
        """Advance all sections with classical RK4 at step ``dt``.

        Convenience for standalone use; simulations normally integrate the
        chain as part of one composite state vector.
        """
        h = dt / substeps
        for _ in range(substeps):
            s0 = [b.state for b in self.sections]
            k1 = self.derivatives(x)
            self._set([s + 0.5 * h * k for s, k in zip(s0, k1)])
            k2 = self.derivatives(x)
            self._set([s + 0.5 * h * k for s, k in zip(s0, k2)])
            k3 = self.derivatives(x)
            self._set([s + h * k for s, k in zip(s0, k3)])
            k4 = self.derivatives(x)
            self._set([
                s + (h / 6.0) * (a + 2 * b + 2 * c + d)
                for s, a, b, c, d in zip(s0, k1, k2, k3, k4)
            ])

    def _set(self, states: list[float]) -> None:
        for blk, s in zip(self.sections, states):
            blk.state = s

    def lowpass_outputs(self) -> list[float]:
        """[1/(p+lam)^i [x] for i = 1..n] (lowpass chains only)."""
        if self.kind != "lowpass":
            raise ValueError("lowpass taps undefined for highpass chain")
        lam = self.lam
        out, scale = [], 1.0
        for blk in self.sections:
            scale /= lam
            out.append(blk.state * scale)
        return out

    def highpass_outputs(self, x: float) -> list[float]:
        """[(p/(p+lam))^i [x] for i = 1..n] (highpass chains only)."""
        if self.kind != "highpass":
            raise ValueError("highpass taps undefined for lowpass chain")
        out, prev = [], x
        for blk in self.sections:
            prev = prev - blk.state
            out.append(prev)
        return out


class SwapNode:
    """Filter pair evaluating F[w]*v - F[(1/lam)*F[w]*v_dot].

    ``outer`` tracks F[w]; ``inner`` tracks the filtered correction term.
    The caller guarantees that ``v_dot`` is the exact derivative of ``v``
    (the identity's standing assumption).  With matched zero initial
    conditions the output equals F[w*v]; mismatched initial conditions add
    a term decaying like exp(-lam*t).
    """

    __slots__ = ("outer", "inner")

    def __init__(self, lam: float):
        self.outer = FilterBlock(lam)
        self.inner = FilterBlock(lam)

    @property
    def lam(self) -> float:
        return self.outer.lam

    def derivatives(self, w: float, v_dot: float) -> tuple[float, float]:
        """(outer', inner') for inputs ``w`` and ``v_dot``."""
        d_outer = self.outer.derivative(w)
        d_inner = self.inner.derivative(self.outer.state * v_dot / self.lam)
        return d_outer, d_inner

    def output(self, v: float) -> float:
        """Right-hand side of the swap identity at the current states."""
        if not math.isfinite(v):
            raise NonFiniteSignal(f"non-finite swap factor {v!r}")
        return self.outer.state * v - self.inner.state


def swap_apply(node: SwapNode, w: float, v: float, v_dot: float) -> float:
    """Evaluate the swap identity's right-hand side and validate inputs."""
    if not (math.isfinite(w) and math.isfinite(v) and math.isfinite(v_dot)):
        raise NonFiniteSignal("non-finite input to swap_apply")
    return node.output(v)
