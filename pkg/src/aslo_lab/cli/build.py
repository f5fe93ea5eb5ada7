"""Turn a parsed config mapping into a runnable Scenario.

Performs full schema validation: unknown keys are rejected, required
keys named, observer types checked against the scenario's plant.
"""

from __future__ import annotations

from ..errors import ConfigError
from ..observers_em import (Fo1Observer, Fo2Observer, Fo3Observer, PmsmAaslo,
                            PmsmAslo, WrimAaslo, WrimAslo)
from ..observers_linear import (ChainAslo, DiAaslo, DiAasloRealization, DiAslo,
                                DiAsloRealization, DiLuenberger)
from ..observers_mech import BallBeamAslo, RoboticLegAslo, ballbeam_aaslo, leg_aaslo
from ..plants import (BallBeamModel, DoubleIntegrator, IntegratorChain,
                      PmsmModel, RoboticLegModel, WrimModel, ballbeam_default,
                      leg_default, pmsm_bmp0701f, wrim_lab)
from ..simkit.controllers import (BallBeamRegulator, PmsmPiController,
                                  pmsm_steady_start_loaded)
from ..simkit.scenario import Disturbance, ObserverSpec, Scenario
from .configfile import Config
from .expressions import compile_time_expr

_SCENARIO_KEYS = {"plant", "dt", "t_end", "decimate", "seed", "seed_filter_ics",
                  "x0", "load", "record_w", "label"}
_PLANT_KEYS = {
    "di": set(),
    "chain": {"n"},
    "pmsm": {"preset", "R", "L", "J", "Rm", "np", "lam_m"},
    "wrim": {"preset", "Rs", "Rr", "Ls", "Lr", "Lsr", "J", "Rm"},
    "leg": {"m1", "m2", "q1_min"},
    "bb": {"ell", "g"},
}
_DISTURBANCE_KEYS = {"kind", "delta", "sigma", "tau"}
_CONTROLLER_KEYS = {
    "pmsm_pi": {"kind", "wref", "kp_w", "ki_w", "kp_i", "ki_i", "iq_limit",
                "vmax", "steady_start"},
    "bb_reg": {"kind", "q1ref", "wn", "zeta", "kp_beam", "kd_beam", "q2_max"},
}
_OBSERVER_TYPES = {
    "di_aslo": ("di", {"lambda"}),
    "di_aslo_ss": ("di", {"lambda"}),
    "di_aaslo": ("di", {"lambda", "gamma"}),
    "di_aaslo_ss": ("di", {"lambda", "gamma"}),
    "luenberger": ("di", {"gamma"}),
    "chain_aslo": ("chain", {"lambda"}),
    "pmsm_aslo": ("pmsm", {"lambda", "delta_eps", "warmup"}),
    "pmsm_aaslo": ("pmsm", {"lambda", "gamma", "delta_eps", "warmup"}),
    "fo1": ("pmsm", {"lambda", "gamma"}),
    "fo2": ("pmsm", {"gamma"}),
    "fo3": ("pmsm", {"lambda", "gamma", "delta_eps", "warmup"}),
    "wrim_aslo": ("wrim", {"lambda", "delta_eps", "warmup"}),
    "wrim_aaslo": ("wrim", {"lambda", "gamma_s", "gamma_r", "delta_eps", "warmup"}),
    "leg_aslo": ("leg", {"lambda", "literal_forms"}),
    "leg_aaslo": ("leg", {"lambda", "gamma"}),
    "bb_aslo": ("bb", {"lambda"}),
    "bb_aaslo": ("bb", {"lambda", "gamma"}),
}


def _section(cfg: Config, name: str) -> dict[str, object]:
    return {k.split(".", 1)[1]: v for k, v in cfg.items() if k.split(".", 1)[0] == name}


def _require(sec: dict, name: str, key: str):
    if key not in sec:
        raise ConfigError(f"missing required key {name}.{key}")
    return sec[key]


def _check_keys(sec: dict, name: str, allowed: set[str]) -> None:
    for k in sec:
        if k not in allowed:
            raise ConfigError(f"unknown key {name}.{k}")


def _floats_list(text: str, where: str) -> list[float]:
    try:
        return [float(p) for p in text.split(",")]
    except ValueError:
        raise ConfigError(f"{where}: expected comma-separated numbers, got {text!r}") from None


def _build_plant(kind: str, sec: dict):
    _check_keys(sec, "plant", _PLANT_KEYS.get(kind, set()))
    if kind == "di":
        return DoubleIntegrator()
    if kind == "chain":
        return IntegratorChain(int(_require(sec, "plant", "n")))
    if kind == "pmsm":
        preset = sec.get("preset", "bmp0701f")
        if preset != "bmp0701f":
            raise ConfigError(f"unknown pmsm preset {preset!r}")
        base = pmsm_bmp0701f()
        return PmsmModel(
            R=float(sec.get("R", base.R)), L=float(sec.get("L", base.L)),
            J=float(sec.get("J", base.J)), Rm=float(sec.get("Rm", base.Rm)),
            np_pairs=int(sec.get("np", base.np_pairs)),
            lam_m=float(sec.get("lam_m", base.lam_m)), i_max=base.i_max,
        )
    if kind == "wrim":
        preset = sec.get("preset", "wrim_lab")
        if preset != "wrim_lab":
            raise ConfigError(f"unknown wrim preset {preset!r}")
        base = wrim_lab()
        return WrimModel(
            Rs=float(sec.get("Rs", base.Rs)), Rr=float(sec.get("Rr", base.Rr)),
            Ls=float(sec.get("Ls", base.Ls)), Lr=float(sec.get("Lr", base.Lr)),
            Lsr=float(sec.get("Lsr", base.Lsr)), J=float(sec.get("J", base.J)),
            Rm=float(sec.get("Rm", base.Rm)),
        )
    if kind == "leg":
        base = leg_default()
        return RoboticLegModel(m1=float(sec.get("m1", base.m1)),
                               m2=float(sec.get("m2", base.m2)),
                               q1_min=float(sec.get("q1_min", base.q1_min)))
    if kind == "bb":
        base = ballbeam_default()
        return BallBeamModel(ell=float(sec.get("ell", base.ell)),
                             g=float(sec.get("g", base.g)))
    raise ConfigError(f"unknown plant {kind!r}")


def _truth_fn(kind: str):
    if kind in ("di",):
        return lambda p, x: p.velocity(x)
    if kind == "chain":
        return lambda p, x: p.hidden_states(x)
    if kind in ("pmsm", "wrim"):
        return lambda p, x: p.flux(x)
    return lambda p, x: p.qdot(x)


def _build_observer(name: str, sec: dict, plant_kind: str, plant):
    otype = _require(sec, name, "type")
    if otype not in _OBSERVER_TYPES:
        raise ConfigError(f"{name}.type: unknown observer type {otype!r}")
    want_plant, allowed = _OBSERVER_TYPES[otype]
    if want_plant != plant_kind:
        raise ConfigError(f"{name}: observer {otype!r} requires plant {want_plant!r}, "
                          f"scenario has {plant_kind!r}")
    _check_keys({k: v for k, v in sec.items() if k != "type"}, name, allowed)
    lam = float(sec.get("lambda", 0.0))
    gam = float(sec.get("gamma", 0.0))
    extra = {}
    if "delta_eps" in sec:
        extra["delta_eps"] = float(sec["delta_eps"])
    if "warmup" in sec:
        extra["warmup"] = float(sec["warmup"])
    if otype == "di_aslo":
        return DiAslo(lam)
    if otype == "di_aslo_ss":
        return DiAsloRealization(lam)
    if otype == "di_aaslo":
        return DiAaslo(lam, gam)
    if otype == "di_aaslo_ss":
        return DiAasloRealization(lam, gam)
    if otype == "luenberger":
        return DiLuenberger(gam)
    if otype == "chain_aslo":
        return ChainAslo(plant.n, lam)
    if otype == "pmsm_aslo":
        return PmsmAslo(lam, plant.R, plant.L, plant.lam_m, **extra)
    if otype == "pmsm_aaslo":
        return PmsmAaslo(lam, gam, plant.R, plant.L, plant.lam_m, **extra)
    if otype == "fo1":
        return Fo1Observer(lam, gam, plant.R, plant.L)
    if otype == "fo2":
        return Fo2Observer(gam, plant.R, plant.L, plant.lam_m)
    if otype == "fo3":
        return Fo3Observer(lam, gam, plant.R, plant.L, plant.lam_m, **extra)
    if otype == "wrim_aslo":
        return WrimAslo(lam, plant, **extra)
    if otype == "wrim_aaslo":
        return WrimAaslo(lam, float(_require(sec, name, "gamma_s")),
                         float(_require(sec, name, "gamma_r")), plant, **extra)
    if otype == "leg_aslo":
        return RoboticLegAslo(lam, plant.m1, plant.m2,
                              literal_forms=bool(sec.get("literal_forms", False)))
    if otype == "leg_aaslo":
        return leg_aaslo(lam, gam, plant.m1, plant.m2)
    if otype == "bb_aslo":
        return BallBeamAslo(lam, plant.ell, plant.g)
    if otype == "bb_aaslo":
        return ballbeam_aaslo(lam, gam, plant.ell, plant.g)
    raise AssertionError(otype)


def build_scenario(cfg: Config) -> Scenario:
    known_sections = {"scenario", "plant", "excitation", "controller",
                      "disturbance", "observers"}
    scen = _section(cfg, "scenario")
    _check_keys(scen, "scenario", _SCENARIO_KEYS)
    plant_kind = str(_require(scen, "scenario", "plant"))
    plant = _build_plant(plant_kind, _section(cfg, "plant"))

    obs_sec = _section(cfg, "observers")
    _check_keys(obs_sec, "observers", {"list"})
    names = [n.strip() for n in str(_require(obs_sec, "observers", "list")).split(",") if n.strip()]
    if not names:
        raise ConfigError("observers.list must name at least one observer")
    known_sections.update(names)
    for key in cfg:
        section = key.split(".", 1)[0]
        if section not in known_sections:
            raise ConfigError(f"unknown section {section!r} (key {key})")

    truth = _truth_fn(plant_kind)
    observers = [ObserverSpec(n, _build_observer(n, _section(cfg, n), plant_kind, plant), truth)
                 for n in names]

    dist_sec = _section(cfg, "disturbance")
    _check_keys(dist_sec, "disturbance", _DISTURBANCE_KEYS)
    disturbance = Disturbance(
        kind=str(dist_sec.get("kind", "none")),
        delta=float(dist_sec.get("delta", 0.0)),
        sigma=float(dist_sec.get("sigma", 0.01)),
        tau=float(dist_sec.get("tau", 1.0)),
    )

    load = None
    if "load" in scen:
        load = compile_time_expr(str(scen["load"]), "scenario.load")

    x0 = None
    if "x0" in scen:
        vals = _floats_list(str(scen["x0"]), "scenario.x0")
        if len(vals) != plant.nstates:
            raise ConfigError(f"scenario.x0 needs {plant.nstates} values, got {len(vals)}")
        x0 = tuple(vals)

    exc_sec = _section(cfg, "excitation")
    ctl_sec = _section(cfg, "controller")
    if bool(exc_sec) == bool(ctl_sec):
        raise ConfigError("provide exactly one of [excitation] or [controller]")

    input_fn = None
    controller = None
    if exc_sec:
        _check_keys(exc_sec, "excitation", {"u"} | {f"u{i+1}" for i in range(plant.m)})
        if plant.m == 1 and "u" in exc_sec:
            fn = compile_time_expr(str(exc_sec["u"]), "excitation.u")
            input_fn = lambda t: (fn(t),)
        else:
            fns = []
            for i in range(plant.m):
                key = f"u{i+1}"
                fns.append(compile_time_expr(str(_require(exc_sec, "excitation", key)),
                                             f"excitation.{key}"))
            input_fn = lambda t: tuple(fn(t) for fn in fns)
    else:
        ckind = str(_require(ctl_sec, "controller", "kind"))
        if ckind not in _CONTROLLER_KEYS:
            raise ConfigError(f"controller.kind: unknown controller {ckind!r}")
        _check_keys(ctl_sec, "controller", _CONTROLLER_KEYS[ckind])
        if ckind == "pmsm_pi":
            if plant_kind != "pmsm":
                raise ConfigError("controller 'pmsm_pi' requires plant \"pmsm\"")
            wref = compile_time_expr(str(_require(ctl_sec, "controller", "wref")),
                                     "controller.wref")
            kw = {k: float(ctl_sec[k]) for k in
                  ("kp_w", "ki_w", "kp_i", "ki_i", "iq_limit", "vmax") if k in ctl_sec}
            controller = PmsmPiController(plant, wref, **kw)
            if bool(ctl_sec.get("steady_start", False)):
                if x0 is not None:
                    raise ConfigError("controller.steady_start conflicts with scenario.x0")
                tau0 = load(0.0) if load is not None else 0.0
                px0, c0 = pmsm_steady_start_loaded(plant, controller, tau0)
                x0 = tuple(px0)
                controller.init_integrals = c0
        else:
            if plant_kind != "bb":
                raise ConfigError("controller 'bb_reg' requires plant \"bb\"")
            q1ref = compile_time_expr(str(_require(ctl_sec, "controller", "q1ref")),
                                      "controller.q1ref")
            kw = {k: float(ctl_sec[k]) for k in
                  ("wn", "zeta", "kp_beam", "kd_beam", "q2_max") if k in ctl_sec}
            controller = BallBeamRegulator(plant, q1ref, **kw)

    return Scenario(
        plant=plant,
        observers=observers,
        input_fn=input_fn,
        controller=controller,
        load=load,
        disturbance=disturbance,
        x0=x0,
        dt=float(scen.get("dt", 1e-4)),
        t_end=float(_require(scen, "scenario", "t_end")),
        decimate=int(scen.get("decimate", 1)),
        seed=int(scen.get("seed", 0)),
        seed_filter_ics=bool(scen.get("seed_filter_ics", False)),
        record_w=bool(scen.get("record_w", False)),
        label=str(scen.get("label", "")),
    )


def resolved_config(cfg: Config) -> Config:
    """The config with CLI-overridable scenario keys materialized."""
    out = dict(cfg)
    out.setdefault("scenario.dt", 1e-4)
    out.setdefault("scenario.decimate", 1)
    out.setdefault("scenario.seed", 0)
    return out
