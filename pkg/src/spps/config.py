"""Run configurations: INI-style ``key = value`` files with one section per command.

Numbers may be written as constant expressions (``pi``, ``-12``, ``2*pi``),
complex numbers as ``(re, im)`` and lists as comma-separated items.  The
same keys may be given in a JSON object ``{"solve-sl": {...}}``.
"""

from __future__ import annotations

import configparser
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InputError
from .expr import Var, parse_potential_expr

REQUIRED = object()

# type tags: real, int, complex, clist (list of complex), expr (function of x), choice:<a|b>, path
SCHEMAS = {
    "solve-sl": {
        "a": ("real", REQUIRED), "b": ("real", REQUIRED), "q": ("expr", "0"),
        "alpha": ("complex", 0j), "beta1": ("complex", 1 + 0j), "beta2": ("complex", 0j),
        "beta1p": ("complex", 0j), "beta2p": ("complex", 0j), "phi_poly": ("clist", ()),
        "x0": ("real", None), "N": ("int", 100), "M": ("int", 3000),
        "convention": ("choice:spps|schrodinger", "spps"), "lambda0": ("complex", 0j),
        "region_center": ("complex", None), "region_radius": ("real", None),
    },
    "solve-well": {
        "alpha1": ("real", REQUIRED), "alpha2": ("real", REQUIRED), "width": ("real", REQUIRED),
        "q": ("expr", REQUIRED), "left": ("real", 0.0), "N": ("int", 180), "M": ("int", 3000),
        "scan": ("int", 2000),
    },
    "powers": {
        "a": ("real", REQUIRED), "b": ("real", REQUIRED), "q": ("expr", "0"), "x0": ("real", None),
        "N": ("int", 10), "M": ("int", 3000),
    },
    "kernel": {
        "a": ("real", None), "nodes": ("int", 201), "c": ("complex", 0j), "h": ("complex", 0j),
        "h_new": ("complex", None), "q": ("expr", "0"), "M": ("int", 2000), "tol": ("real", 1e-12),
        "input": ("path", None), "f": ("expr", None), "u": ("expr", None), "n_max": ("int", 2),
        "kind": ("choice:full|cos|sin", "full"), "h_c": ("complex", 0j),
    },
    "dirac": {
        "a": ("real", REQUIRED), "b": ("real", REQUIRED), "m": ("real", REQUIRED), "S": ("expr", "0"),
        "E": ("complex", REQUIRED), "C1": ("complex", 1 + 0j), "C2": ("complex", 0j),
        "N": ("int", 60), "M": ("int", 2000),
    },
}
SCHEMAS["char-map"] = dict(SCHEMAS["solve-sl"], **{
    "re_min": ("real", REQUIRED), "re_max": ("real", REQUIRED), "im_min": ("real", REQUIRED),
    "im_max": ("real", REQUIRED), "nx": ("int", 101), "ny": ("int", 101),
})


def _split_top_level(text: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p.strip() for p in parts]


def _constant(text: str, key: str) -> float:
    expr = parse_potential_expr(text)
    if _uses_x(expr.tree):
        raise InputError(f"{key}: expected a constant, got an expression in x")
    value = complex(expr(0.0))
    if value.imag != 0 or not np.isfinite(value.real):
        raise InputError(f"{key}: {text!r} is not a finite real number")
    return value.real


def _uses_x(node) -> bool:
    if isinstance(node, Var):
        return True
    return any(_uses_x(child) for child in getattr(node, "__dict__", {}).values()
               if not isinstance(child, (str, float)))


def _complex(text: str, key: str) -> complex:
    text = text.strip()
    if text.startswith("(") and text.endswith(")"):
        inner = _split_top_level(text[1:-1])
        if len(inner) == 2:
            return complex(_constant(inner[0], key), _constant(inner[1], key))
    return complex(_constant(text, key), 0.0)


def _convert(key: str, kind: str, raw):
    if isinstance(raw, (list, tuple)) and kind == "clist":
        return tuple(_convert(key, "complex", item) for item in raw)
    if isinstance(raw, bool):
        raise InputError(f"{key}: booleans are not accepted")
    if isinstance(raw, (int, float)) and kind in ("real", "int", "complex", "clist", "expr"):
        raw = repr(raw)
    if not isinstance(raw, str):
        raise InputError(f"{key}: unsupported value {raw!r}")
    text = raw.strip()
    if kind == "real":
        return _constant(text, key)
    if kind == "int":
        try:
            return int(text)
        except ValueError:
            raise InputError(f"{key}: expected an integer, got {text!r}") from None
    if kind == "complex":
        return _complex(text, key)
    if kind == "clist":
        return tuple(_complex(item, key) for item in _split_top_level(text)) if text else ()
    if kind == "expr":
        parse_potential_expr(text)
        return text
    if kind == "path":
        return text
    if kind.startswith("choice:"):
        options = kind.split(":", 1)[1].split("|")
        if text not in options:
            raise InputError(f"{key}: expected one of {options}, got {text!r}")
        return text
    raise AssertionError(kind)


@dataclass(frozen=True)
class RunConfig:
    command: str
    values: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.values[key]

    def get(self, key, default=None):
        value = self.values.get(key)
        return default if value is None else value

    def with_overrides(self, **overrides) -> "RunConfig":
        vals = dict(self.values)
        for key, value in overrides.items():
            if value is None:
                continue
            if key not in SCHEMAS[self.command]:
                raise InputError(f"option {key} does not apply to {self.command}")
            vals[key] = value
        return RunConfig(self.command, vals)


def build_config(command: str, raw: dict) -> RunConfig:
    if command not in SCHEMAS:
        raise InputError(f"unknown command {command!r}")
    schema = SCHEMAS[command]
    unknown = sorted(set(raw) - set(schema))
    if unknown:
        raise InputError(f"[{command}] unknown keys: {', '.join(unknown)}")
    values = {}
    for key, (kind, default) in schema.items():
        if key in raw:
            values[key] = _convert(key, kind, raw[key])
        elif default is REQUIRED:
            raise InputError(f"[{command}] missing required key {key!r}")
        else:
            values[key] = default
    return RunConfig(command, values)


def parse_config_text(text: str, command: str) -> RunConfig:
    """Parse INI or JSON text and return the section for ``command``."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"invalid JSON config: {exc}") from None
        if not isinstance(data, dict) or command not in data or not isinstance(data[command], dict):
            raise InputError(f"config has no object for {command!r}")
        return build_config(command, data[command])
    parser = configparser.ConfigParser(interpolation=None, strict=True)
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise InputError(f"invalid config: {exc}") from None
    if not parser.has_section(command):
        raise InputError(f"config has no [{command}] section")
    return build_config(command, dict(parser.items(command)))


def load_config(path, command: str) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(f"cannot read config {path}: {exc}") from None
    return parse_config_text(text, command)


def _format(kind: str, value) -> str:
    if kind == "real":
        return repr(float(value))
    if kind == "int":
        return str(int(value))
    if kind == "complex":
        return f"({float(value.real)!r}, {float(value.imag)!r})"
    if kind == "clist":
        return ", ".join(_format("complex", v) for v in value)
    return str(value)


def dump_config(cfg: RunConfig) -> str:
    """INI text that parses back to ``cfg``; unset optional keys are omitted."""
    schema = SCHEMAS[cfg.command]
    lines = [f"[{cfg.command}]"]
    for key, (kind, _) in schema.items():
        value = cfg.values.get(key)
        if value is None:
            continue
        lines.append(f"{key} = {_format(kind, value)}")
    return "\n".join(lines) + "\n"
