"""Run configuration: defaults, then a config file, then command-line flags.

Config file format (UTF-8)::

    # comment
    family = dsl
    params = x, y
    band = 0
    center = 0.5, 0.5
    radius = 0.2
    samples = 2000
    ```matrix
    [[x, y],
     [y, -x]]
    ```

A fenced block supplies the DSL matrix text (``family = dsl`` is implied).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields
from pathlib import Path

from .errors import ConfigError

FORMATS = ("json", "csv")


@dataclass
class RunConfig:
    command: str = ""
    family: str | None = None  # builtin name, or "dsl"
    dsl: str | None = None
    dsl_file: str | None = None
    params: tuple[str, ...] = ()
    band: int = 0
    center: tuple[float, float] = (0.0, 0.0)
    radius: float = 1.0
    winding: int = 1
    samples: int | None = None
    vertices: list | None = None
    gauge: str | None = None
    flux: float | None = None
    solenoid_center: tuple[float, float] = (0.0, 0.0)
    gap_tol: float = 1e-8
    tol: float = 1e-9
    theta: float | None = None
    dimension: int | None = None
    states: list | None = None
    closed: bool = True
    phase_a: float | None = None
    phase_b: float | None = None
    convergence: bool = False
    format: str = "json"
    output: str | None = None

    def echo(self) -> dict:
        """Non-default settings, in field order, for the report header."""
        defaults = RunConfig()
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name in ("output", "format") or value == getattr(defaults, f.name):
                continue
            out[f.name] = list(value) if isinstance(value, tuple) else value
        return out

    def validate(self) -> "RunConfig":
        sources = [s for s in (self.dsl, self.dsl_file) if s is not None]
        if self.family not in (None, "dsl") and sources:
            raise ConfigError("give exactly one family source (builtin name, DSL text or DSL file)")
        if len(sources) > 1:
            raise ConfigError("give exactly one family source (builtin name, DSL text or DSL file)")
        if self.samples is not None and self.samples < 3:
            raise ConfigError("samples must be at least 3")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}")
        if self.winding == 0:
            raise ConfigError("winding must be nonzero")
        if not self.radius > 0:
            raise ConfigError("radius must be positive")
        return self


_CONVERTERS = {
    "band": int,
    "winding": int,
    "samples": int,
    "dimension": int,
    "radius": float,
    "flux": float,
    "gap_tol": float,
    "tol": float,
    "theta": float,
    "phase_a": float,
    "phase_b": float,
}


def _real(text: str) -> float:
    """Float, also accepting 'pi' multiples like 'pi/3' or '2*pi'."""
    from .dsl import parse_expression, eval_node

    try:
        return float(text)
    except ValueError:
        pass
    try:
        value = complex(eval_node(parse_expression(text), {}))
    except Exception as exc:
        raise ConfigError(f"cannot read {text!r} as a number: {exc}") from None
    if value.imag != 0 or not math.isfinite(value.real):
        raise ConfigError(f"{text!r} is not a finite real number")
    return value.real


def _pair(text: str) -> tuple[float, float]:
    parts = [p for p in text.replace("(", "").replace(")", "").split(",") if p.strip()]
    if len(parts) != 2:
        raise ConfigError(f"expected two comma-separated numbers, got {text!r}")
    return (_real(parts[0].strip()), _real(parts[1].strip()))


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


def _json(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from None


def convert(key: str, text: str):
    key = key.replace("-", "_")
    try:
        if key in ("center", "solenoid_center"):
            return _pair(text)
        if key == "params":
            return tuple(p.strip() for p in text.split(",") if p.strip())
        if key in ("vertices", "states"):
            return _json(text)
        if key in ("convergence", "closed"):
            return _bool(text)
        if key in ("theta", "flux", "phase_a", "phase_b", "radius"):
            return _real(text)
        if key in _CONVERTERS:
            return _CONVERTERS[key](text)
    except ValueError:
        raise ConfigError(f"bad value for {key}: {text!r}") from None
    if key in {f.name for f in fields(RunConfig)}:
        return text
    raise ConfigError(f"unknown config key {key!r}")


def parse_config_text(text: str) -> dict:
    """Parse ``key = value`` lines and one optional fenced matrix block."""
    values: dict = {}
    lines = text.splitlines()
    i = 0
    while i < len(lines):
        line = lines[i]
        stripped = line.strip()
        i += 1
        if not stripped or stripped.startswith("#"):
            continue
        if stripped.startswith("```"):
            block = []
            while i < len(lines) and not lines[i].strip().startswith("```"):
                block.append(lines[i])
                i += 1
            if i >= len(lines):
                raise ConfigError(f"unterminated fenced block opened at line {i - len(block)}")
            i += 1
            if "dsl" in values:
                raise ConfigError("more than one DSL matrix block")
            values["dsl"] = "\n".join(block)
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {i}: expected 'key = value', got {stripped!r}")
        key, _, raw = stripped.partition("=")
        key = key.strip().replace("-", "_")
        values[key] = convert(key, raw.strip())
    return values


def load_config_file(path: str) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise ConfigError(f"config file is not UTF-8: {exc}") from None
    return parse_config_text(text)


def build_config(command: str, file_values: dict, flag_values: dict) -> RunConfig:
    cfg = RunConfig(command=command)
    file_cmd = file_values.pop("command", None)
    if file_cmd not in (None, command):
        raise ConfigError(f"config file is for command {file_cmd!r}, not {command!r}")
    for source in (file_values, flag_values):
        for key, value in source.items():
            if value is None:
                continue
            if not hasattr(cfg, key):
                raise ConfigError(f"unknown config key {key!r}")
            setattr(cfg, key, value)
    if cfg.dsl is not None and cfg.family is None:
        cfg.family = "dsl"
    return cfg.validate()
