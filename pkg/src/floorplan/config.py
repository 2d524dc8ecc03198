"""Backend/strategy defaults from ``floorplan.toml``.

Precedence, highest first: command-line flags, config file,
``$FLOORPLAN_BACKEND`` (backend path only), built-in defaults.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

CONFIG_NAME = "floorplan.toml"


@dataclass
class Settings:
    backend: str | None = None
    dialect: str = "plain"
    timeout: float = 60.0
    jobs: int = 1
    args: list[str] = field(default_factory=list)
    input_mode: str = "stdin"
    strategy: str | None = None
    cluster_size: int = 30


_KEYS = {"backend": str, "dialect": str, "timeout": float, "jobs": int, "args": list,
         "input_mode": str, "strategy": str, "cluster_size": int}


def load_settings(path: str | Path | None = None) -> Settings:
    settings = Settings()
    if path is None and Path(CONFIG_NAME).is_file():
        path = CONFIG_NAME
    if path is not None:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
        for key, value in data.items():
            if key not in _KEYS:
                raise ValueError(f"unknown config key {key!r} in {path}")
            setattr(settings, key, _KEYS[key](value))
    if settings.backend is None:
        settings.backend = os.environ.get("FLOORPLAN_BACKEND") or "z3"
    return settings
