"""Figure-spec files: the same flat `section.key = value` grammar as the
simulator's scenario configs.

    figure.out = "errors.png"       # output image, required
    figure.title = "..."            # optional
    figure.xlabel = "time [s]"      # optional
    figure.ylabel = "error"         # optional
    figure.logy = true              # optional, default false
    series1.file = "out/trace.csv"  # per-series, required
    series1.channel = "aslo.err_xhat2"
    series1.label = "rate 3"        # optional, defaults to the channel
    series1.panel = 1               # optional panel number, default 1

Values are numbers, true/false, or double-quoted strings; '#' comments.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field


class SpecError(Exception):
    """Malformed or incomplete figure spec."""


_LINE = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\.([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(.+)$")
_NUMBER = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")
_FIGURE_KEYS = {"out", "title", "xlabel", "ylabel", "logy"}
_SERIES_KEYS = {"file", "channel", "label", "panel"}


@dataclass
class SeriesSpec:
    file: str
    channel: str
    label: str
    panel: int = 1


@dataclass
class FigureSpec:
    out: str
    series: list[SeriesSpec]
    title: str = ""
    xlabel: str = "t [s]"
    ylabel: str = ""
    logy: bool = False
    panels: list[int] = field(default_factory=list)

    def __post_init__(self):
        self.panels = sorted({s.panel for s in self.series})


def _parse_value(raw: str, where: str):
    raw = raw.strip()
    if raw.startswith('"'):
        if not (raw.endswith('"') and len(raw) >= 2):
            raise SpecError(f"{where}: unterminated string {raw!r}")
        return raw[1:-1]
    if raw in ("true", "false"):
        return raw == "true"
    if _NUMBER.match(raw):
        return int(raw) if re.match(r"^[+-]?\d+$", raw) else float(raw)
    raise SpecError(f"{where}: bad value {raw!r}")


def parse_figure_spec(text: str, source: str = "<spec>") -> FigureSpec:
    figure: dict = {}
    series_raw: dict[str, dict] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _LINE.match(line)
        if m is None:
            raise SpecError(f"{source}:{lineno}: expected 'section.key = value'")
        section, key, value = m.group(1), m.group(2), _parse_value(m.group(3), f"{source}:{lineno}")
        if section == "figure":
            if key not in _FIGURE_KEYS:
                raise SpecError(f"{source}:{lineno}: unknown key figure.{key}")
            figure[key] = value
        elif section.startswith("series"):
            if key not in _SERIES_KEYS:
                raise SpecError(f"{source}:{lineno}: unknown key {section}.{key}")
            series_raw.setdefault(section, {})[key] = value
        else:
            raise SpecError(f"{source}:{lineno}: unknown section {section!r}")

    if "out" not in figure:
        raise SpecError(f"{source}: figure.out is required")
    if not series_raw:
        raise SpecError(f"{source}: at least one seriesN section is required "
                        "(usage: seriesN.file / seriesN.channel [...])")

    series = []
    for name in sorted(series_raw, key=lambda s: (len(s), s)):
        sec = series_raw[name]
        for req in ("file", "channel"):
            if req not in sec:
                raise SpecError(f"{source}: {name}.{req} is required")
        series.append(SeriesSpec(
            file=str(sec["file"]),
            channel=str(sec["channel"]),
            label=str(sec.get("label", sec["channel"])),
            panel=int(sec.get("panel", 1)),
        ))
    return FigureSpec(
        out=str(figure["out"]),
        series=series,
        title=str(figure.get("title", "")),
        xlabel=str(figure.get("xlabel", "t [s]")),
        ylabel=str(figure.get("ylabel", "")),
        logy=bool(figure.get("logy", False)),
    )
