"""plotview: spec parsing, rendering, failure modes, and the smoke suite
over every simulator preset (driven through the external CLI only)."""

import shutil
import subprocess
import sys

import pytest

from plotview import (FigureSpec, MissingChannel, SeriesSpec, SpecError,
                      parse_figure_spec, render)
from plotview.main import main

ASLO_LAB = shutil.which("aslo-lab")

# shortened horizons per preset: rendering exercises the schema, not physics
PRESET_T_END = {
    "fig1a": 0.2, "fig1b": 0.2, "fig1c": 0.2, "fig1d": 0.2, "fig-noise": 0.2,
    "fig-tau": 0.2, "robust-outdist": 0.2, "robust-indist": 0.2,
    "chain-n4": 0.2, "pmsm-fluxcompare": 0.2, "wrim-flux": 0.2,
    "leg-vel": 1.0, "bb-vel": 1.0,
}


def write_csv(path, channels, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(["t"] + channels) + "\n")
        for row in rows:
            fh.write(",".join("%.12e" % v for v in row) + "\n")


@pytest.fixture()
def small_trace(tmp_path):
    path = tmp_path / "trace.csv"
    rows = [(0.01 * k, 0.1 * k, 1.0 / (k + 1)) for k in range(50)]
    write_csv(path, ["a.x", "b.err_y"], rows)
    return path


class TestSpecParsing:
    def test_full_spec(self, small_trace):
        text = f"""
figure.out = "fig.png"
figure.title = "demo"
figure.logy = true
series1.file = "{small_trace}"
series1.channel = "a.x"
series1.label = "position"
series2.file = "{small_trace}"
series2.channel = "b.err_y"
series2.panel = 2
"""
        spec = parse_figure_spec(text)
        assert spec.out == "fig.png"
        assert spec.logy is True
        assert [s.panel for s in spec.series] == [1, 2]
        assert spec.panels == [1, 2]
        assert spec.series[0].label == "position"
        assert spec.series[1].label == "b.err_y"

    def test_requires_out(self):
        with pytest.raises(SpecError, match="figure.out"):
            parse_figure_spec('series1.file = "x"\nseries1.channel = "c"\n')

    def test_requires_series(self):
        with pytest.raises(SpecError, match="usage"):
            parse_figure_spec('figure.out = "f.png"\n')

    def test_unknown_keys_rejected(self):
        with pytest.raises(SpecError, match="unknown key"):
            parse_figure_spec('figure.oops = 1\n')
        with pytest.raises(SpecError, match="unknown section"):
            parse_figure_spec('other.x = 1\n')

    def test_series_requires_channel(self):
        with pytest.raises(SpecError, match="series1.channel"):
            parse_figure_spec('figure.out = "f.png"\nseries1.file = "x"\n')


class TestRender:
    def test_renders_png(self, small_trace, tmp_path):
        spec = FigureSpec(out="fig.png", series=[
            SeriesSpec(str(small_trace), "a.x", "a"),
            SeriesSpec(str(small_trace), "b.err_y", "b", panel=2),
        ])
        target = render(spec, tmp_path / "img")
        assert target.exists()
        assert target.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"

    def test_deterministic_output(self, small_trace, tmp_path):
        spec = FigureSpec(out="fig.png", series=[
            SeriesSpec(str(small_trace), "a.x", "a")])
        first = render(spec, tmp_path / "one").read_bytes()
        second = render(spec, tmp_path / "two").read_bytes()
        assert first == second

    def test_missing_channel_named(self, small_trace, tmp_path):
        spec = FigureSpec(out="fig.png", series=[
            SeriesSpec(str(small_trace), "nope.z", "z")])
        with pytest.raises(MissingChannel, match="nope.z"):
            render(spec, tmp_path)


class TestCli:
    def test_missing_channel_exits_nonzero(self, small_trace, tmp_path, capsys):
        spec = tmp_path / "f.spec"
        spec.write_text(f'figure.out = "f.png"\nseries1.file = "{small_trace}"\n'
                        'series1.channel = "ghost.ch"\n')
        assert main([str(spec), "--out", str(tmp_path)]) == 1
        assert "ghost.ch" in capsys.readouterr().err

    def test_empty_series_rejected_with_usage(self, tmp_path, capsys):
        spec = tmp_path / "f.spec"
        spec.write_text('figure.out = "f.png"\n')
        assert main([str(spec), "--out", str(tmp_path)]) == 1
        assert "usage" in capsys.readouterr().err

    def test_spec_file_missing(self, tmp_path):
        assert main([str(tmp_path / "no.spec"), "--out", str(tmp_path)]) == 1

    def test_renders_via_cli(self, small_trace, tmp_path, capsys):
        spec = tmp_path / "f.spec"
        spec.write_text(f'figure.out = "out.png"\nseries1.file = "{small_trace}"\n'
                        'series1.channel = "a.x"\n')
        assert main([str(spec), "--out", str(tmp_path / "img")]) == 0
        assert (tmp_path / "img" / "out.png").exists()


@pytest.fixture(scope="module")
def preset_traces(tmp_path_factory):
    if ASLO_LAB is None:
        pytest.skip("aslo-lab CLI not installed")
    root = tmp_path_factory.mktemp("presets")
    traces = {}
    for name, t_end in PRESET_T_END.items():
        out = root / name
        proc = subprocess.run(
            [ASLO_LAB, "run", "--preset", name, "--t-end", str(t_end),
             "--out", str(out)],
            capture_output=True, text=True)
        assert proc.returncode == 0, (name, proc.stderr)
        traces[name] = out / "trace.csv"
    return traces


@pytest.mark.skipif(ASLO_LAB is None, reason="aslo-lab CLI not installed")
class TestPresetSmoke:
    """Acceptance: every simulator preset's trace renders without error."""

    def test_every_preset_renders(self, preset_traces, tmp_path):
        for name, csv_path in preset_traces.items():
            header = csv_path.read_text(encoding="utf-8").splitlines()[0].split(",")
            err_channels = [ch for ch in header if ".err_" in ch]
            assert err_channels, name
            # one panel per observer, mirroring the published figure style
            panels = {}
            lines = ['figure.out = "%s.png"' % name, 'figure.ylabel = "error"']
            for i, ch in enumerate(err_channels, start=1):
                obs = ch.split(".")[0]
                panels.setdefault(obs, len(panels) + 1)
                lines.append(f'series{i}.file = "{csv_path}"')
                lines.append(f'series{i}.channel = "{ch}"')
                lines.append(f'series{i}.label = "{ch}"')
                lines.append(f'series{i}.panel = {panels[obs]}')
            spec_path = tmp_path / f"{name}.spec"
            spec_path.write_text("\n".join(lines) + "\n")
            assert main([str(spec_path), "--out", str(tmp_path / "img")]) == 0
            assert (tmp_path / "img" / f"{name}.png").exists()

    def test_single_axes_rate_comparison(self, preset_traces, tmp_path):
        # three rate-labeled error curves on one axes
        csv_path = preset_traces["fig1a"]
        lines = ['figure.out = "fig1a.png"', 'figure.ylabel = "velocity error"']
        for i, (obs, label) in enumerate(
                [("aslo1", "rate 1"), ("aslo3", "rate 3"), ("aslo5", "rate 5")],
                start=1):
            lines += [f'series{i}.file = "{csv_path}"',
                      f'series{i}.channel = "{obs}.err_xhat2"',
                      f'series{i}.label = "{label}"']
        spec_path = tmp_path / "fig1a.spec"
        spec_path.write_text("\n".join(lines) + "\n")
        assert main([str(spec_path), "--out", str(tmp_path)]) == 0

    def test_five_panel_flux_comparison(self, preset_traces, tmp_path):
        csv_path = preset_traces["pmsm-fluxcompare"]
        lines = ['figure.out = "flux.png"']
        i = 1
        for panel, obs in enumerate(("aslo", "aaslo", "fo1", "fo2", "fo3"), start=1):
            for comp in (1, 2):
                lines += [f'series{i}.file = "{csv_path}"',
                          f'series{i}.channel = "{obs}.err_phihat{comp}"',
                          f'series{i}.panel = {panel}']
                i += 1
        spec_path = tmp_path / "flux.spec"
        spec_path.write_text("\n".join(lines) + "\n")
        assert main([str(spec_path), "--out", str(tmp_path)]) == 0
        assert (tmp_path / "flux.png").exists()
