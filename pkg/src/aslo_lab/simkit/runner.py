"""Composite fixed-step simulation: plant + controller + observer banks
integrated as one ODE, with disturbance plumbing and trace recording.

State layout: [plant | controller | parasitic lag | observer 1 | ...].
Measurement noise is sampled once per step and held constant inside the
step, so the integrated system remains an ordinary ODE; the sample drawn
at step k is also the one used for the boundary record at t_k.

Per-step observer bookkeeping (singularity hold levels, running RMS
thresholds) runs once per completed step via ``post_step``, never inside
Runge-Kutta stages, so it is decimation-independent and deterministic.
"""

from __future__ import annotations

import math

from ..errors import NonFiniteSignal
from .integrate import rk4_step
from .noise import NoiseSource
from .scenario import Scenario


class Trace:
    """Columnar record of one run: shared time axis plus named channels."""

    def __init__(self, channels: list[str]):
        self.channels = list(channels)
        self.t: list[float] = []
        self.data: dict[str, list[float]] = {ch: [] for ch in channels}
        self.meta: dict = {}

    def append(self, t: float, row: list[float]) -> None:
        self.t.append(t)
        for ch, v in zip(self.channels, row):
            self.data[ch].append(v)

    def column(self, name: str) -> list[float]:
        if name not in self.data:
            raise KeyError(f"unknown trace channel {name!r}")
        return self.data[name]

    def __len__(self) -> int:
        return len(self.t)


class Simulation:
    """One scenario, assembled: owns the state layout and the run loop."""

    def __init__(self, scenario: Scenario):
        scenario.validate()
        self.sc = scenario
        plant = scenario.plant
        self._noise: tuple | None = None

        off = plant.nstates
        self._ctrl_slice = None
        if scenario.controller is not None:
            n = scenario.controller.nstates
            self._ctrl_slice = (off, off + n)
            off += n
        self._par_slice = None
        if scenario.disturbance.kind == "parasitic_input":
            self._par_slice = (off, off + plant.m)
            off += plant.m
        self._obs_slices = []
        for spec in scenario.observers:
            n = spec.observer.nstates
            self._obs_slices.append((spec, off, off + n))
            off += n
        self.nstates = off

        kind = scenario.disturbance.kind
        self._noisy = kind == "white_noise_on_measured_input"
        self._in_delta = scenario.disturbance.delta if kind == "constant_on_input" else 0.0
        self._out_delta = scenario.disturbance.delta if kind == "constant_on_output" else 0.0

        chans = [f"plant.{name}" for name in plant.state_names]
        chans += [f"u.{i+1}" for i in range(plant.m)]
        for spec in scenario.observers:
            obs = spec.observer
            chans += [f"{spec.name}.{e}" for e in obs.est_names]
            chans += [f"{spec.name}.err_{e}" for e in obs.est_names]
            chans += [f"{spec.name}.{d}" for d in getattr(obs, "diag_names", ())]
            if scenario.record_w:
                chans += [f"{spec.name}.{w}" for w in getattr(obs, "w_names", ())]
        self.channels = chans

    # -- signal plumbing ---------------------------------------------------

    def _u_cmd(self, t, s) -> tuple:
        sc = self.sc
        if sc.controller is not None:
            a, b = self._ctrl_slice
            return sc.controller.control(t, s[a:b], s[: sc.plant.nstates])
        return sc.input_fn(t)

    def _measured(self, t, s):
        """(u_cmd, u_meas, y_meas) as the observers see them."""
        sc = self.sc
        u_cmd = self._u_cmd(t, s)
        if self._noisy and self._noise is not None:
            u_meas = tuple(u + n for u, n in zip(u_cmd, self._noise))
        else:
            u_meas = u_cmd
        y = sc.plant.output(s[: sc.plant.nstates])
        if self._out_delta:
            y_meas = tuple(v + self._out_delta for v in y)
        else:
            y_meas = y
        return u_cmd, u_meas, y_meas

    def deriv(self, t, s) -> list[float]:
        sc = self.sc
        plant = sc.plant
        u_cmd, u_meas, y_meas = self._measured(t, s)

        if self._par_slice is not None:
            a, b = self._par_slice
            u_plant = tuple(s[a:b])
        elif self._in_delta:
            u_plant = tuple(u + self._in_delta for u in u_cmd)
        else:
            u_plant = u_cmd

        x = s[: plant.nstates]
        if plant.has_load:
            tau = sc.load(t) if sc.load is not None else 0.0
            ds = plant.deriv(t, x, u_plant, tau)
        else:
            ds = plant.deriv(t, x, u_plant)

        if self._ctrl_slice is not None:
            a, b = self._ctrl_slice
            ds += sc.controller.deriv(t, s[a:b], x)
        if self._par_slice is not None:
            a, b = self._par_slice
            tau = sc.disturbance.tau
            ds += [(v - s[i]) / tau for v, i in zip(u_cmd, range(a, b))]
        for spec, a, b in self._obs_slices:
            ds += spec.observer.deriv(t, s[a:b], u_meas, y_meas)
        return ds

    # -- running -----------------------------------------------------------

    def initial_state(self) -> list[float]:
        sc = self.sc
        s = list(sc.x0) if sc.x0 is not None else list(sc.plant.init_state())
        if len(s) != sc.plant.nstates:
            raise ValueError("x0 length does not match plant state size")
        if self._ctrl_slice is not None:
            s += sc.controller.init_state()
        if self._par_slice is not None:
            s += [0.0] * sc.plant.m  # lag state starts at rest
        for spec, _, _ in self._obs_slices:
            s += spec.observer.init_state()
        return s

    def _record_row(self, t, s, u_cmd, u_meas, y_meas) -> list[float]:
        sc = self.sc
        row = list(s[: sc.plant.nstates])
        row += list(u_cmd)
        for spec, a, b in self._obs_slices:
            obs = spec.observer
            sub = s[a:b]
            est = obs.outputs(t, sub, u_meas, y_meas)
            tru = spec.truth(sc.plant, s[: sc.plant.nstates])
            row += list(est)
            row += [e - v for e, v in zip(est, tru)]
            if getattr(obs, "diag_names", ()):
                row += list(obs.diag(t, sub, u_meas, y_meas))
            if sc.record_w:
                wn = getattr(obs, "w_names", ())
                if wn:
                    row += list(obs.w_values(t, sub, u_meas, y_meas))
        total = 0.0
        for v in row:
            total += v
        if not math.isfinite(total):
            for ch, v in zip(self.channels, row):
                if not math.isfinite(v):
                    raise NonFiniteSignal(
                        f"non-finite value in channel {ch} at t={t:.6g}", signal=ch, t=t
                    )
        return row

    def run(self, s0: list[float] | None = None) -> Trace:
        sc = self.sc
        nsteps = sc.nsteps
        dt = sc.dt
        noise_src = None
        if self._noisy:
            noise_src = NoiseSource(sc.seed, sc.disturbance.sigma)
        for spec, _, _ in self._obs_slices:
            reset = getattr(spec.observer, "reset", None)
            if reset is not None:
                reset()

        s = list(s0) if s0 is not None else self.initial_state()
        if len(s) != self.nstates:
            raise ValueError("state vector length mismatch")
        trace = Trace(self.channels)

        m = sc.plant.m
        for k in range(nsteps + 1):
            t = k * dt
            if noise_src is not None:
                self._noise = tuple(noise_src.normal() for _ in range(m))
            u_cmd, u_meas, y_meas = self._measured(t, s)
            if k == 0:
                # Denominator sections are always seeded from measurable
                # initial data; full filter seeding is a scenario option.
                attr = "seed_state" if sc.seed_filter_ics else "seed_denominators"
                for spec, a, b in self._obs_slices:
                    seed = getattr(spec.observer, attr, None)
                    if seed is not None:
                        sub = s[a:b]
                        seed(sub, u_meas, y_meas)
                        s[a:b] = sub
            for spec, a, b in self._obs_slices:
                post = getattr(spec.observer, "post_step", None)
                if post is not None:
                    post(t, s[a:b], u_meas, y_meas)
            if k % sc.decimate == 0:
                trace.append(t, self._record_row(t, s, u_cmd, u_meas, y_meas))
            if k < nsteps:
                s = rk4_step(self.deriv, t, s, dt)
        self._noise = None

        trace.meta["dt"] = dt
        trace.meta["nsteps"] = nsteps
        trace.meta["label"] = sc.label
        held = {}
        for spec, _, _ in self._obs_slices:
            hf = getattr(spec.observer, "held_fraction", None)
            if hf is not None:
                held[spec.name] = hf()
        trace.meta["held_fraction"] = held
        trace.meta["final_state"] = list(s)
        return trace


def run(scenario: Scenario) -> Trace:
    """Assemble and run a scenario."""
    return Simulation(scenario).run()
