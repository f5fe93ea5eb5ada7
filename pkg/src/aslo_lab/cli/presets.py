"""Named scenario presets.

Each preset is a complete config file; `aslo-lab run --preset NAME`
parses it exactly like a user file, so every preset doubles as a worked
example of the config grammar.
"""

from __future__ import annotations

PRESETS: dict[str, tuple[str, str]] = {}


def _preset(name: str, summary: str, text: str) -> None:
    PRESETS[name] = (summary, text.strip() + "\n")


_DI_BASE = """
scenario.plant = "di"
scenario.x0 = "0, 0.1"
scenario.dt = 1e-4
scenario.t_end = 20.0
scenario.decimate = 100
excitation.u = "cos(0.02*t)"
"""

_preset("fig1a", "algebraic velocity observer, rates 1/3/5, slow-cosine input", _DI_BASE + """
observers.list = "aslo1,aslo3,aslo5"
aslo1.type = "di_aslo"
aslo1.lambda = 1.0
aslo3.type = "di_aslo"
aslo3.lambda = 3.0
aslo5.type = "di_aslo"
aslo5.lambda = 5.0
""")

_preset("fig1b", "asymptotic variant, gain 2, rates 1/3/5", _DI_BASE + """
observers.list = "aaslo1,aaslo3,aaslo5"
aaslo1.type = "di_aaslo"
aaslo1.lambda = 1.0
aaslo1.gamma = 2.0
aaslo3.type = "di_aaslo"
aaslo3.lambda = 3.0
aaslo3.gamma = 2.0
aaslo5.type = "di_aaslo"
aaslo5.lambda = 5.0
aaslo5.gamma = 2.0
""")

_preset("fig1c", "asymptotic variant, rate 2.5, gains 1/2/5", _DI_BASE + """
observers.list = "aasg1,aasg2,aasg5"
aasg1.type = "di_aaslo"
aasg1.lambda = 2.5
aasg1.gamma = 1.0
aasg2.type = "di_aaslo"
aasg2.lambda = 2.5
aasg2.gamma = 2.0
aasg5.type = "di_aaslo"
aasg5.lambda = 2.5
aasg5.gamma = 5.0
""")

_preset("fig1d", "reduced-order Luenberger baseline, gains 1/3/5", _DI_BASE + """
observers.list = "luen1,luen3,luen5"
luen1.type = "luenberger"
luen1.gamma = 1.0
luen3.type = "luenberger"
luen3.gamma = 3.0
luen5.type = "luenberger"
luen5.gamma = 5.0
""")

_preset("fig-noise", "white noise on the measured input, all three observers", _DI_BASE + """
scenario.seed = 42
disturbance.kind = "white_noise_on_measured_input"
disturbance.sigma = 0.01
observers.list = "aslo,aaslo,luen"
aslo.type = "di_aslo"
aslo.lambda = 3.0
aaslo.type = "di_aaslo"
aaslo.lambda = 3.0
aaslo.gamma = 2.0
luen.type = "luenberger"
luen.gamma = 3.0
""")

_preset("fig-tau", "first-order parasitic actuator lag on the plant input", _DI_BASE + """
disturbance.kind = "parasitic_input"
disturbance.tau = 1.0
observers.list = "aslo,aaslo,luen"
aslo.type = "di_aslo"
aslo.lambda = 3.0
aaslo.type = "di_aaslo"
aaslo.lambda = 3.0
aaslo.gamma = 2.0
luen.type = "luenberger"
luen.gamma = 3.0
""")

_preset("robust-outdist", "constant bias 0.5 on the measured output", """
scenario.plant = "di"
scenario.x0 = "0, 0.1"
scenario.dt = 1e-4
scenario.t_end = 10.0
scenario.decimate = 100
excitation.u = "cos(0.02*t)"
disturbance.kind = "constant_on_output"
disturbance.delta = 0.5
observers.list = "aslo,luen"
aslo.type = "di_aslo"
aslo.lambda = 3.0
luen.type = "luenberger"
luen.gamma = 3.0
""")

_preset("robust-indist", "constant bias 0.5 on the plant input, observers unaware", """
scenario.plant = "di"
scenario.x0 = "0, 0.1"
scenario.dt = 1e-4
scenario.t_end = 10.0
scenario.decimate = 100
excitation.u = "cos(0.02*t)"
disturbance.kind = "constant_on_input"
disturbance.delta = 0.5
observers.list = "aslo,luen"
aslo.type = "di_aslo"
aslo.lambda = 3.0
luen.type = "luenberger"
luen.gamma = 3.0
""")

_preset("chain-n4", "fourth-order integrator chain, generated coefficients", """
scenario.plant = "chain"
plant.n = 4
scenario.x0 = "0.1, 0.1, 0.1, 0.1"
scenario.dt = 1e-4
scenario.t_end = 30.0
scenario.decimate = 100
excitation.u = "cos(0.02*t)"
observers.list = "chain"
chain.type = "chain_aslo"
chain.lambda = 1.0
""")

_preset("pmsm-fluxcompare", "five flux observers on the 2.3 A servo motor under PI speed control", """
scenario.plant = "pmsm"
plant.preset = "bmp0701f"
scenario.dt = 1e-4
scenario.t_end = 12.0
scenario.decimate = 100
scenario.load = "3 + 0.5*sin(0.1*t)"
controller.kind = "pmsm_pi"
controller.wref = "2 + 0.5*sin(t)"
controller.steady_start = true
observers.list = "aslo,aaslo,fo1,fo2,fo3"
aslo.type = "pmsm_aslo"
aslo.lambda = 5.0
aaslo.type = "pmsm_aaslo"
aaslo.lambda = 5.0
aaslo.gamma = 5.0
fo1.type = "fo1"
fo1.lambda = 5.0
fo1.gamma = 5.0
fo2.type = "fo2"
fo2.gamma = 1000.0
fo3.type = "fo3"
fo3.lambda = 5.0
fo3.gamma = 5.0
""")

_preset("wrim-flux", "wound-rotor machine, per-branch flux solves, two-phase supply", """
scenario.plant = "wrim"
plant.preset = "wrim_lab"
scenario.dt = 1e-4
scenario.t_end = 10.0
scenario.decimate = 100
scenario.load = "8"
excitation.u1 = "60*cos(10*pi*t)"
excitation.u2 = "60*sin(10*pi*t)"
observers.list = "aslo,aaslo"
aslo.type = "wrim_aslo"
aslo.lambda = 5.0
aaslo.type = "wrim_aaslo"
aaslo.lambda = 5.0
aaslo.gamma_s = 5.0
aaslo.gamma_r = 5.0
""")

_preset("leg-vel", "robotic leg velocity observers, open-loop forcing", """
scenario.plant = "leg"
plant.m1 = 1.0
plant.m2 = 1.0
scenario.x0 = "1, 0, 0, 0, 0.3, -0.2"
scenario.seed_filter_ics = true
scenario.dt = 1e-3
scenario.t_end = 8.0
scenario.decimate = 10
excitation.u1 = "0.2*sin(t)"
excitation.u2 = "0.1*cos(0.5*t)"
observers.list = "aslo,aaslo"
aslo.type = "leg_aslo"
aslo.lambda = 5.0
aaslo.type = "leg_aaslo"
aaslo.lambda = 5.0
aaslo.gamma = 5.0
""")

_preset("bb-vel", "ball-and-beam velocity observers under the tracking regulator", """
scenario.plant = "bb"
plant.ell = 1.0
plant.g = 9.81
scenario.x0 = "0.1, 0.05, 0, 0.2"
scenario.seed_filter_ics = true
scenario.dt = 1e-3
scenario.t_end = 10.0
scenario.decimate = 10
controller.kind = "bb_reg"
controller.q1ref = "0.15*sin(0.5*t)"
observers.list = "aslo,aaslo"
aslo.type = "bb_aslo"
aslo.lambda = 5.0
aaslo.type = "bb_aaslo"
aaslo.lambda = 5.0
aaslo.gamma = 5.0
""")


def preset_text(name: str) -> str:
    if name not in PRESETS:
        raise KeyError(name)
    return PRESETS[name][1]


def preset_summaries() -> list[tuple[str, str]]:
    return [(name, PRESETS[name][0]) for name in PRESETS]
