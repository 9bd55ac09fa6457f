"""Run configuration shared by the scenarios and the command line."""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, fields, replace
from pathlib import Path

SEED_ENV = "HISTLOC_SEED"


@dataclass(frozen=True)
class Config:
    eps_norm: float = 1e-10
    eps_consistency: float = 1e-9
    eps_support: float = 1e-9
    lambda_grid_size: int = 64
    seed: int = 42
    format: str = "json"

    def __post_init__(self):
        if self.format not in ("json", "text"):
            raise ValueError(f"format must be json or text, not {self.format!r}")
        if self.lambda_grid_size < 0:
            raise ValueError("lambda_grid_size must be non-negative")
        for name in ("eps_norm", "eps_consistency", "eps_support"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


def _coerce(name: str, value: str):
    kind = {f.name: f.type for f in fields(Config)}[name]
    if kind == "float":
        return float(value)
    if kind == "int":
        return int(value)
    return value


def read_config_file(path: str | Path) -> dict:
    """``key = value`` lines (``#`` comments allowed); unknown keys are an error."""
    parser = configparser.ConfigParser()
    parser.read_string("[histloc]\n" + Path(path).read_text())
    known = {f.name for f in fields(Config)}
    out = {}
    for key, value in parser["histloc"].items():
        if key not in known:
            raise ValueError(f"unknown config key {key!r} in {path}")
        out[key] = _coerce(key, value)
    return out


def resolve_config(path: str | Path | None = None, overrides: dict | None = None, env=None) -> Config:
    """Defaults, then the config file, then explicit overrides, then ``HISTLOC_SEED``."""
    env = os.environ if env is None else env
    values = read_config_file(path) if path else {}
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    if env.get(SEED_ENV):
        values["seed"] = int(env[SEED_ENV])
    return replace(Config(), **values)
