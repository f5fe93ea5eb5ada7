"""Safe compilation of time-expression strings like "2 + 0.5*sin(t)".

Config files describe open-loop inputs, references, and load profiles as
expressions in the single variable ``t``.  The string is parsed with the
ast module and every node checked against a whitelist (arithmetic,
numeric literals, ``t``, ``pi``, ``e``, and a fixed set of math
functions) before being compiled to a plain function; nothing outside
the whitelist can execute.
"""

from __future__ import annotations

import ast
import math
from typing import Callable

from ..errors import ConfigError

_FUNCS = {
    "sin": math.sin,
    "cos": math.cos,
    "tan": math.tan,
    "exp": math.exp,
    "log": math.log,
    "sqrt": math.sqrt,
    "abs": abs,
    "min": min,
    "max": max,
}
_NAMES = {"t", "pi", "e"}

_ALLOWED_NODES = (
    ast.Expression, ast.BinOp, ast.UnaryOp, ast.Constant, ast.Name, ast.Call,
    ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow, ast.Mod,
    ast.USub, ast.UAdd, ast.Load,
)


def compile_time_expr(expr: str, where: str = "expression") -> Callable[[float], float]:
    """Compile ``expr`` to a float function of t; raises ConfigError on
    anything outside the whitelist."""
    try:
        tree = ast.parse(expr, mode="eval")
    except SyntaxError as exc:
        raise ConfigError(f"{where}: cannot parse {expr!r}: {exc.msg}") from None
    for node in ast.walk(tree):
        if not isinstance(node, _ALLOWED_NODES):
            raise ConfigError(f"{where}: disallowed syntax {type(node).__name__} in {expr!r}")
        if isinstance(node, ast.Call):
            if not (isinstance(node.func, ast.Name) and node.func.id in _FUNCS):
                raise ConfigError(f"{where}: unknown function in {expr!r}")
            if node.keywords:
                raise ConfigError(f"{where}: keyword arguments not allowed in {expr!r}")
        if isinstance(node, ast.Name) and node.id not in _NAMES and node.id not in _FUNCS:
            raise ConfigError(f"{where}: unknown name {node.id!r} in {expr!r}")
        if isinstance(node, ast.Constant) and not isinstance(node.value, (int, float)):
            raise ConfigError(f"{where}: non-numeric constant in {expr!r}")
    env = {"__builtins__": {}, "pi": math.pi, "e": math.e, **_FUNCS}
    # The expression tree is fully whitelisted above, so compiling it
    # wrapped in a lambda under a bare environment is safe.
    return eval(f"lambda t: ({expr})", env)
