"""aslo-lab command line: run scenarios, sweep parameters, list presets.

    aslo-lab run (--preset NAME | CONFIG) [--out DIR] [--seed N]
                 [--dt DT] [--t-end T] [--full-rate]
    aslo-lab sweep --param SECTION.KEY --values V1,V2,... (--preset NAME | CONFIG)
                 [--out DIR] [--seed N]
    aslo-lab presets

Outputs per run: trace.csv, metrics.txt, and scenario.resolved (the fully
resolved config; re-running it reproduces the trace byte for byte).
Exit codes: 0 success, 1 configuration error, 2 simulation abort.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from ..errors import ConfigError, NonFiniteSignal, SingularConfiguration
from ..simkit.runner import Simulation
from . import configfile
from .build import build_scenario, resolved_config
from .csvio import write_metrics, write_trace_csv
from .presets import PRESETS, preset_summaries, preset_text


def _load_config(args) -> configfile.Config:
    if args.preset:
        if args.preset not in PRESETS:
            raise ConfigError(f"unknown preset {args.preset!r}; see 'aslo-lab presets'")
        return configfile.parse(preset_text(args.preset), source=f"preset:{args.preset}")
    if not args.config:
        raise ConfigError("provide a config file or --preset NAME")
    path = Path(args.config)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    return configfile.parse(path.read_text(encoding="utf-8"), source=str(path))


def _apply_overrides(cfg: configfile.Config, args) -> configfile.Config:
    cfg = resolved_config(cfg)
    if args.seed is not None:
        cfg["scenario.seed"] = args.seed
    if args.dt is not None:
        cfg["scenario.dt"] = args.dt
    if args.t_end is not None:
        cfg["scenario.t_end"] = args.t_end
    if getattr(args, "full_rate", False):
        cfg["scenario.decimate"] = 1
    return cfg


def _run_config(cfg: configfile.Config, outdir: Path) -> None:
    scenario = build_scenario(cfg)
    trace = Simulation(scenario).run()
    outdir.mkdir(parents=True, exist_ok=True)
    write_trace_csv(trace, outdir / "trace.csv")
    write_metrics(trace, outdir / "metrics.txt")
    (outdir / "scenario.resolved").write_text(configfile.emit(cfg), encoding="utf-8")


def cmd_run(args) -> int:
    try:
        cfg = _apply_overrides(_load_config(args), args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    try:
        _run_config(cfg, Path(args.out))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (NonFiniteSignal, SingularConfiguration) as exc:
        print(f"simulation aborted: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {Path(args.out) / 'trace.csv'}")
    return 0


def _sweep_worker(payload) -> tuple[str, str]:
    cfg, outdir = payload
    _run_config(cfg, Path(outdir))
    mtext = (Path(outdir) / "metrics.txt").read_text(encoding="utf-8")
    return outdir, mtext


def cmd_sweep(args) -> int:
    try:
        base = _apply_overrides(_load_config(args), args)
        key = args.param
        if "." not in key:
            raise ConfigError("--param must be SECTION.KEY")
        values = [v.strip() for v in args.values.split(",") if v.strip()]
        if not values:
            raise ConfigError("--values must list at least one value")
        jobs = []
        for v in values:
            cfg = dict(base)
            cfg[key] = configfile._parse_value(v, "<sweep>", 0)
            jobs.append((cfg, str(Path(args.out) / f"{key.replace('.', '_')}={v}")))
        for cfg, _ in jobs:
            build_scenario(cfg)  # validate everything before spawning work
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1

    workers = int(os.environ.get("ASLO_LAB_THREADS", "0")) or (os.cpu_count() or 1)
    workers = max(1, min(workers, len(jobs)))
    try:
        if workers == 1:
            results = [_sweep_worker(job) for job in jobs]
        else:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(_sweep_worker, jobs))
    except (NonFiniteSignal, SingularConfiguration) as exc:
        print(f"simulation aborted: {exc}", file=sys.stderr)
        return 2

    summary = Path(args.out) / "summary.txt"
    with open(summary, "w", encoding="utf-8", newline="\n") as fh:
        for outdir, mtext in results:
            fh.write(f"== {outdir}\n")
            fh.write(mtext)
            fh.write("\n")
    print(f"wrote {summary}")
    return 0


def cmd_presets(args) -> int:
    for name, summary in preset_summaries():
        print(f"{name:18s} {summary}")
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="aslo-lab",
                                     description="algebraic state observer lab")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one scenario")
    run.add_argument("config", nargs="?", help="scenario config file")
    run.add_argument("--preset", help="named preset instead of a config file")
    run.add_argument("--out", default="out", help="output directory")
    run.add_argument("--seed", type=int, default=None, help="64-bit noise seed")
    run.add_argument("--dt", type=float, default=None, help="integration step override")
    run.add_argument("--t-end", dest="t_end", type=float, default=None,
                     help="duration override")
    run.add_argument("--full-rate", action="store_true",
                     help="record every step (decimate = 1)")
    run.set_defaults(fn=cmd_run)

    sweep = sub.add_parser("sweep", help="run a scenario over parameter values")
    sweep.add_argument("config", nargs="?", help="base scenario config file")
    sweep.add_argument("--preset", help="named preset as the base scenario")
    sweep.add_argument("--param", required=True, help="config key to sweep (SECTION.KEY)")
    sweep.add_argument("--values", required=True, help="comma-separated values")
    sweep.add_argument("--out", default="out", help="output directory")
    sweep.add_argument("--seed", type=int, default=None)
    sweep.add_argument("--dt", type=float, default=None)
    sweep.add_argument("--t-end", dest="t_end", type=float, default=None)
    sweep.set_defaults(fn=cmd_sweep)

    pres = sub.add_parser("presets", help="list named presets")
    pres.set_defaults(fn=cmd_presets)
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
