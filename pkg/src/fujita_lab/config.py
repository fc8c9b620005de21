"""Run configuration: JSON files, CLI overrides, range syntax.

Schema (flat JSON object; every key optional)::

    {
      "mode": "sweep",                   # exponent|classify|simulate|sweep|kernel|eigen|certify|duhamel
      "output_path": "out.csv",
      "format": "csv",                   # csv|json
      "parallelism": 1,
      "seed": 0,
      ...mode parameters, e.g. "n": 3, "omega": 0, "p": "1.2:3.0:0.2"
    }

Keys not valid for the selected mode are rejected.  Values given on the
command line win over file values; a warning names each conflict.
"""

from __future__ import annotations

import json
import math
import os
import re
import warnings
from dataclasses import dataclass, field

MODES = ("exponent", "classify", "simulate", "sweep", "kernel", "eigen", "certify", "duhamel")
FORMATS = ("csv", "json")
THREADS_ENV = "FUJITA_LAB_THREADS"


class ConfigError(ValueError):
    """Malformed or invalid configuration (exit status 2)."""


_SIM = {
    "c1": 1.0,
    "amplitude": 1.0,
    "width": 1.0,
    "center": 0.0,
    "geometry": "whole",
    "r0": 1.0,
    "eps": 1e-3,
    "t_max": 1e4,
    "r_max": 60.0,
    "grid_points": 1201,
    "xi_points": 801,
    "frame": "auto",
    "blowup_threshold": 1e8,
    "margin": 0.02,
}

# mode -> parameter defaults; None marks a required value
MODE_PARAMS: dict[str, dict] = {
    "exponent": {"n": 3.0, "omega": 0.0, "m": 0.0},
    "classify": {"n": 3.0, "omega": 0.0, "m": 0.0, "p": None, "margin": 0.02},
    "simulate": {"n": 3.0, "omega": 0.0, "m": 0.0, "p": None, **_SIM},
    "sweep": {"n": "3", "omega": "0", "m": "0", "p": None, "simulate": True, **_SIM, "t_max": 1e10},
    "kernel": {"N": 3.0, "t": "1", "r": "1", "rho": "0.5:3:0.5", "r0": 0.0, "c": 1.0, "K0": 1.0},
    "eigen": {"N": 3.0, "a": 1.0, "b": 2.0, "omega": 0.0, "grid_points": 2001, "sizes": ""},
    "certify": {"n": "3", "omega": "0", "m": "0", "p": None},
    "duhamel": {"N": 3.0, "M": 0.0, "p": None, "K1": 1.0, "K2": 1.0, "beta": 0.0, "t": "1e3",
                "r": 4.0, "r0": 2.0},
}

GLOBAL_KEYS = {"mode": None, "output_path": None, "format": "csv", "parallelism": 1, "seed": 0}

# parameters that accept ranges or lists
RANGE_KEYS = {
    "sweep": ("n", "omega", "m", "p"),
    "certify": ("n", "omega", "m", "p"),
    "kernel": ("t", "r", "rho"),
    "duhamel": ("t",),
}


@dataclass
class RunConfig:
    mode: str
    params: dict = field(default_factory=dict)
    output_path: str | None = None
    format: str = "csv"
    parallelism: int = 1
    seed: int = 0
    warnings: list = field(default_factory=list)


def parse_range(text) -> list[float]:
    """'a:b:step' (inclusive), 'x,y,z' or a single number."""
    if isinstance(text, (int, float)):
        return [float(text)]
    s = str(text).strip()
    if not s:
        return []
    if ":" in s:
        parts = s.split(":")
        if len(parts) != 3:
            raise ConfigError(f"range {s!r} must look like start:stop:step")
        try:
            a, b, h = (float(x) for x in parts)
        except ValueError as exc:
            raise ConfigError(f"range {s!r}: {exc}") from None
        if h <= 0 or b < a:
            raise ConfigError(f"range {s!r} needs step > 0 and stop >= start")
        count = int(math.floor((b - a) / h + 1e-9)) + 1
        return [_clean(a + i * h) for i in range(count)]
    try:
        return [float(x) for x in s.split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad number list {s!r}: {exc}") from None


def _clean(x: float) -> float:
    # 1.2 + 2*0.2 is 1.6000000000000003; 12 significant digits is plenty here
    return float(f"{x:.12g}")


def _line_of(text: str, key: str) -> int:
    m = re.search(r'"%s"\s*:' % re.escape(key), text)
    return text.count("\n", 0, m.start()) + 1 if m else 0


def load_file(path) -> tuple[dict, str]:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: malformed JSON: {exc.msg}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}:1: top level must be a JSON object")
    return data, text


def _coerce(key, default, value, where):
    if default is None or isinstance(default, str):
        if isinstance(value, (int, float, str)) and not isinstance(value, bool):
            return value
    elif isinstance(default, bool):
        if isinstance(value, bool):
            return value
    elif isinstance(default, int):
        if isinstance(value, int) and not isinstance(value, bool):
            return value
    elif isinstance(default, float):
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            return float(value)
    raise ConfigError(f"{where}: key {key!r} has the wrong type ({type(value).__name__})")


def parse_config(path=None, overrides: dict | None = None) -> RunConfig:
    """Merge a JSON file (optional) with CLI overrides and validate.

    ``overrides`` maps keys to values explicitly given on the command line;
    absent flags must simply be left out.
    """
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    data, text = ({}, "") if path is None else load_file(path)
    mode = overrides.get("mode", data.get("mode"))
    if mode is None:
        raise ConfigError("no mode given (config key 'mode' or a subcommand)")
    if mode not in MODES:
        raise ConfigError(f"unknown mode {mode!r}; expected one of {', '.join(MODES)}")
    schema = {**GLOBAL_KEYS, **MODE_PARAMS[mode]}
    for key in data:
        if key not in schema:
            raise ConfigError(f"{path}:{_line_of(text, key)}: unknown key {key!r} for mode {mode!r}")
    merged = {}
    notes = []
    for key, default in schema.items():
        if key in data:
            merged[key] = _coerce(key, default, data[key], f"{path}:{_line_of(text, key)}")
        if key in overrides:
            if key in data and data[key] != overrides[key] and key != "mode":
                msg = f"command-line {key}={overrides[key]!r} overrides config value {data[key]!r}"
                warnings.warn(msg, stacklevel=2)
                notes.append(msg)
            merged[key] = overrides[key]
        if key not in merged:
            if default is None and key != "output_path" and key != "mode":
                raise ConfigError(f"mode {mode!r} needs a value for {key!r}")
            merged[key] = default
    fmt = merged["format"]
    if fmt not in FORMATS:
        raise ConfigError(f"format must be one of {FORMATS}, got {fmt!r}")
    par = merged["parallelism"]
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            par = int(env)
        except ValueError:
            raise ConfigError(f"{THREADS_ENV} must be an integer, got {env!r}") from None
    if not isinstance(par, int) or par < 1:
        raise ConfigError("parallelism must be an integer >= 1")
    out = merged["output_path"]
    if out is not None:
        parent = os.path.dirname(os.path.abspath(out)) or "."
        if not os.path.isdir(parent) or not os.access(parent, os.W_OK):
            raise ConfigError(f"output path {out!r} is not writable")
    params = {k: v for k, v in merged.items() if k not in GLOBAL_KEYS}
    for key in RANGE_KEYS.get(mode, ()):
        if params.get(key) is not None:
            params[key] = parse_range(params[key])
            if not params[key]:
                raise ConfigError(f"{key!r} range is empty")
    return RunConfig(
        mode=mode,
        params=params,
        output_path=out,
        format=fmt,
        parallelism=par,
        seed=int(merged["seed"]),
        warnings=notes,
    )
