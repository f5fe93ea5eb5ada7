"""Config grammar, scenario building, presets, CSV output, and the
command-line surface (exit codes, overrides, round-trips, sweeps)."""

import filecmp
import math
import os

import pytest

from aslo_lab.cli import configfile
from aslo_lab.cli.build import build_scenario
from aslo_lab.cli.expressions import compile_time_expr
from aslo_lab.cli.main import main
from aslo_lab.cli.presets import PRESETS, preset_text
from aslo_lab.errors import ConfigError

MINIMAL = """
scenario.plant = "di"
scenario.t_end = 1.0
scenario.dt = 1e-3
excitation.u = "cos(0.02*t)"
observers.list = "aslo"
aslo.type = "di_aslo"
aslo.lambda = 3.0
"""


class TestConfigFile:
    def test_parse_types(self):
        cfg = configfile.parse('a.x = 1\na.y = -2.5e-3\na.s = "hi"\na.b = true\n')
        assert cfg == {"a.x": 1, "a.y": -2.5e-3, "a.s": "hi", "a.b": True}

    def test_comments_and_blanks(self):
        cfg = configfile.parse("# header\n\na.x = 1  # trailing\n")
        assert cfg == {"a.x": 1}

    def test_bad_lines_rejected(self):
        for text in ("novalue\n", "a.x 1\n", "a.x = 'single'\n", "a.x = oops\n",
                     'a.x = "unterminated\n'):
            with pytest.raises(ConfigError):
                configfile.parse(text)

    def test_duplicate_key_rejected(self):
        with pytest.raises(ConfigError, match="duplicate"):
            configfile.parse("a.x = 1\na.x = 2\n")

    def test_emit_round_trip(self):
        cfg = {"b.y": 0.1 + 0.2, "a.x": 3, "a.s": "text", "a.flag": False}
        assert configfile.parse(configfile.emit(cfg)) == cfg


class TestExpressions:
    def test_basic_evaluation(self):
        fn = compile_time_expr("2 + 0.5*sin(t)")
        assert fn(0.0) == pytest.approx(2.0)
        assert fn(math.pi / 2) == pytest.approx(2.5)

    def test_constants(self):
        assert compile_time_expr("pi")(0.0) == pytest.approx(math.pi)

    def test_rejects_unsafe(self):
        for expr in ("__import__('os')", "t.__class__", "open('x')",
                     "lambda x: x", "[1,2]", "'str'"):
            with pytest.raises(ConfigError):
                compile_time_expr(expr)


class TestBuildScenario:
    def test_minimal(self):
        sc = build_scenario(configfile.parse(MINIMAL))
        sc.validate()
        assert sc.plant.nstates == 2
        assert sc.observers[0].name == "aslo"

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown key"):
            build_scenario(configfile.parse(MINIMAL + "scenario.bogus = 1\n"))

    def test_unknown_section_rejected(self):
        with pytest.raises(ConfigError, match="unknown section"):
            build_scenario(configfile.parse(MINIMAL + "mystery.x = 1\n"))

    def test_missing_required_key(self):
        text = MINIMAL.replace('scenario.t_end = 1.0\n', "")
        with pytest.raises(ConfigError, match="t_end"):
            build_scenario(configfile.parse(text))

    def test_observer_plant_mismatch(self):
        text = MINIMAL.replace('aslo.type = "di_aslo"', 'aslo.type = "fo2"')
        with pytest.raises(ConfigError, match="requires plant"):
            build_scenario(configfile.parse(text))

    def test_x0_length_checked(self):
        with pytest.raises(ConfigError, match="x0"):
            build_scenario(configfile.parse(MINIMAL + 'scenario.x0 = "1, 2, 3"\n'))

    def test_both_excitation_and_controller_rejected(self):
        text = MINIMAL + 'controller.kind = "pmsm_pi"\ncontroller.wref = "2"\n'
        with pytest.raises(ConfigError, match="exactly one"):
            build_scenario(configfile.parse(text))

    def test_every_preset_builds(self):
        for name in PRESETS:
            cfg = configfile.parse(preset_text(name), source=name)
            sc = build_scenario(cfg)
            sc.validate()


class TestCommandLine:
    def test_presets_listing(self, capsys):
        assert main(["presets"]) == 0
        out = capsys.readouterr().out
        assert "fig1a" in out and "pmsm-fluxcompare" in out

    def test_run_without_target_exit_1(self, capsys):
        assert main(["run", "--out", "/tmp/x"]) == 1
        assert "config file or --preset" in capsys.readouterr().err

    def test_channel_set_is_seed_independent(self, tmp_path):
        # CSV schema is a pure function of the scenario's observer list
        cfg = tmp_path / "s.cfg"
        cfg.write_text(MINIMAL)
        headers = []
        for seed in ("1", "2"):
            out = tmp_path / f"o{seed}"
            main(["run", str(cfg), "--seed", seed, "--out", str(out)])
            headers.append((out / "trace.csv").read_text().splitlines()[0])
        assert headers[0] == headers[1]

    def test_unknown_preset_exit_1(self, capsys):
        assert main(["run", "--preset", "nope", "--out", "/tmp/x"]) == 1
        assert "unknown preset" in capsys.readouterr().err

    def test_bad_config_exit_1(self, tmp_path, capsys):
        bad = tmp_path / "bad.cfg"
        bad.write_text("scenario.plant = \"di\"\nwhat is this\n")
        assert main(["run", str(bad), "--out", str(tmp_path / "o")]) == 1

    def test_missing_config_exit_1(self, tmp_path):
        assert main(["run", str(tmp_path / "nope.cfg"), "--out", str(tmp_path)]) == 1

    def test_run_writes_outputs(self, tmp_path):
        cfg = tmp_path / "s.cfg"
        cfg.write_text(MINIMAL)
        out = tmp_path / "out"
        assert main(["run", str(cfg), "--out", str(out)]) == 0
        assert (out / "trace.csv").exists()
        assert (out / "metrics.txt").exists()
        assert (out / "scenario.resolved").exists()
        header = (out / "trace.csv").read_text().splitlines()[0]
        assert header == "t,plant.x1,plant.x2,u.1,aslo.xhat2,aslo.err_xhat2"

    def test_csv_format(self, tmp_path):
        cfg = tmp_path / "s.cfg"
        cfg.write_text(MINIMAL)
        out = tmp_path / "out"
        main(["run", str(cfg), "--out", str(out)])
        raw = (out / "trace.csv").read_bytes()
        assert b"\r" not in raw
        line = raw.decode().splitlines()[1].split(",")
        assert all("e" in cell for cell in line)  # %.12e everywhere
        assert len(line[1].split("e")[0].split(".")[1]) == 12

    def test_seed_determinism_and_overrides(self, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        for out in (out1, out2):
            code = main(["run", "--preset", "fig-noise", "--seed", "7",
                         "--t-end", "1.0", "--out", str(out)])
            assert code == 0
        assert filecmp.cmp(out1 / "trace.csv", out2 / "trace.csv", shallow=False)

    def test_resolved_round_trip(self, tmp_path):
        out1 = tmp_path / "first"
        main(["run", "--preset", "fig-noise", "--seed", "3", "--t-end", "1.0",
              "--out", str(out1)])
        out2 = tmp_path / "second"
        assert main(["run", str(out1 / "scenario.resolved"), "--out", str(out2)]) == 0
        assert filecmp.cmp(out1 / "trace.csv", out2 / "trace.csv", shallow=False)

    def test_full_rate_flag(self, tmp_path):
        cfg = tmp_path / "s.cfg"
        cfg.write_text(MINIMAL)
        out = tmp_path / "o"
        main(["run", str(cfg), "--full-rate", "--out", str(out)])
        lines = (out / "trace.csv").read_text().count("\n")
        assert lines == 1 + 1001  # header + every step of 1 s at 1 ms

    def test_sweep(self, tmp_path, monkeypatch):
        monkeypatch.setenv("ASLO_LAB_THREADS", "1")
        cfg = tmp_path / "s.cfg"
        cfg.write_text(MINIMAL)
        out = tmp_path / "sweep"
        code = main(["sweep", str(cfg), "--param", "aslo.lambda",
                     "--values", "1.0,2.0", "--out", str(out)])
        assert code == 0
        assert (out / "aslo_lambda=1.0" / "trace.csv").exists()
        assert (out / "aslo_lambda=2.0" / "trace.csv").exists()
        assert (out / "summary.txt").exists()

    def test_sweep_parallel_workers(self, tmp_path, monkeypatch):
        monkeypatch.setenv("ASLO_LAB_THREADS", "2")
        cfg = tmp_path / "s.cfg"
        cfg.write_text(MINIMAL)
        out = tmp_path / "psweep"
        assert main(["sweep", str(cfg), "--param", "aslo.lambda",
                     "--values", "1.0,2.0", "--out", str(out)]) == 0
        assert (out / "aslo_lambda=1.0" / "trace.csv").exists()
        assert (out / "aslo_lambda=2.0" / "trace.csv").exists()

    def test_sweep_bad_param_exit_1(self, tmp_path):
        cfg = tmp_path / "s.cfg"
        cfg.write_text(MINIMAL)
        assert main(["sweep", str(cfg), "--param", "nodot",
                     "--values", "1", "--out", str(tmp_path / "x")]) == 1

    def test_sweep_rate_monotone_settling(self, tmp_path, monkeypatch):
        # a faster filter settles faster: the sweep summary shows it
        monkeypatch.setenv("ASLO_LAB_THREADS", "1")
        cfg = tmp_path / "s.cfg"
        cfg.write_text(MINIMAL.replace("scenario.t_end = 1.0", "scenario.t_end = 6.0")
                       + 'scenario.x0 = "0, 0.1"\n')
        out = tmp_path / "sw"
        assert main(["sweep", str(cfg), "--param", "aslo.lambda",
                     "--values", "1.0,2.0,4.0", "--out", str(out)]) == 0
        settles = []
        for v in ("1.0", "2.0", "4.0"):
            text = (out / f"aslo_lambda={v}" / "metrics.txt").read_text()
            line = next(ln for ln in text.splitlines()
                        if ln.startswith("aslo.err_xhat2:"))
            settles.append(float(line.rsplit("settle=", 1)[1]))
        assert settles[0] > settles[1] > settles[2]

    def test_simulation_abort_exit_2(self, tmp_path, capsys):
        text = MINIMAL + "bad.type = \"di_aaslo\"\nbad.lambda = 3.0\nbad.gamma = 1e7\n"
        text = text.replace('observers.list = "aslo"', 'observers.list = "aslo,bad"')
        cfg = tmp_path / "s.cfg"
        cfg.write_text(text)
        import warnings
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            assert main(["run", str(cfg), "--out", str(tmp_path / "o")]) == 2
        assert "aborted" in capsys.readouterr().err
