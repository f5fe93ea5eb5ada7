"""Flat key-value scenario files.

Grammar, one assignment per line:

    section.key = value

where value is a number (decimal or scientific), ``true``/``false``, or a
double-quoted string.  ``#`` starts a comment; blank lines are ignored.
The format is deliberately flat so configs diff cleanly and round-trip
exactly: floats are emitted with ``repr``, which parses back bit-equal.
"""

from __future__ import annotations

import re

from ..errors import ConfigError

Value = float | int | bool | str
Config = dict[str, Value]  # keyed by "section.key"

_LINE = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*\.[A-Za-z_][A-Za-z0-9_]*)\s*=\s*(.+)$")
_NUMBER = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")


def parse(text: str, source: str = "<config>") -> Config:
    cfg: Config = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _LINE.match(line)
        if m is None:
            raise ConfigError(f"{source}:{lineno}: expected 'section.key = value', got {raw!r}")
        key, val = m.group(1), m.group(2).strip()
        if key in cfg:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key}")
        cfg[key] = _parse_value(val, source, lineno)
    return cfg


def _parse_value(val: str, source: str, lineno: int) -> Value:
    if val.startswith('"'):
        if not (val.endswith('"') and len(val) >= 2):
            raise ConfigError(f"{source}:{lineno}: unterminated string {val!r}")
        return val[1:-1]
    if val in ("true", "false"):
        return val == "true"
    if _NUMBER.match(val):
        if re.match(r"^[+-]?\d+$", val):
            return int(val)
        return float(val)
    raise ConfigError(
        f"{source}:{lineno}: bad value {val!r} (number, true/false, or \"string\")"
    )


def emit(cfg: Config) -> str:
    """Canonical text for a config: sections and keys sorted, one
    assignment per line.  ``parse(emit(cfg)) == cfg``."""
    lines = []
    for key in sorted(cfg):
        lines.append(f"{key} = {_format_value(cfg[key])}")
    return "\n".join(lines) + "\n"


def _format_value(v: Value) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, str):
        return f'"{v}"'
    if isinstance(v, int):
        return str(v)
    return repr(v)
