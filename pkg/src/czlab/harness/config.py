"""Experiment configuration: a small JSON schema with defaults per experiment.

A config file is one JSON object::

    {
      "experiment": "strong-type",       # required; see ``czlab list``
      "seed": 0,                         # fixes every random draw
      "levels": [8, 9, 10],              # grid levels swept
      "family_size": 50,                 # inputs per level
      "halfwidth": 2.0,                  # box [-R, R]
      "operators": [{"type": "paraproduct", "V": 6},
                    {"type": "bpdo", "symbol": "smooth"}],
      "inputs": {"kind": "step-functions"},
      "symbols": {"kind": "bmo-bumps"},
      "weights": [[{"type": "power", "a": -0.4}, {"type": "power", "a": 0.0}]],
      "exponents": {"kind": "exponents"},
      "params": {},                      # experiment specific knobs
      "tolerances": {"drift": 0.25}
    }

Only ``experiment`` is required; every other key falls back to the
experiment's defaults.  Unknown keys are rejected so typos do not pass
silently.
"""

from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

__all__ = ["ExperimentConfig", "ConfigError", "load_config", "FIELDS"]

FIELDS = (
    "experiment",
    "seed",
    "levels",
    "family_size",
    "halfwidth",
    "operators",
    "inputs",
    "symbols",
    "weights",
    "exponents",
    "params",
    "tolerances",
)


class ConfigError(ValueError):
    """The config does not match the schema."""


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    seed: int = 0
    levels: tuple[int, ...] = (8, 9, 10)
    family_size: int = 10
    halfwidth: float = 2.0
    operators: tuple = ()
    inputs: dict = field(default_factory=dict)
    symbols: dict = field(default_factory=dict)
    weights: tuple = ()
    exponents: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)

    def __post_init__(self):
        if not isinstance(self.experiment, str) or not self.experiment:
            raise ConfigError("experiment must be a nonempty string")
        if int(self.seed) != self.seed or self.seed < 0:
            raise ConfigError("seed must be a nonnegative integer")
        levels = tuple(int(v) for v in self.levels)
        if any(v < 0 or v > 64 for v in levels):
            raise ConfigError("levels must lie in 0..64")
        object.__setattr__(self, "levels", levels)
        if int(self.family_size) != self.family_size or self.family_size < 0:
            raise ConfigError("family_size must be a nonnegative integer")
        if not float(self.halfwidth) > 0:
            raise ConfigError("halfwidth must be positive")
        object.__setattr__(self, "operators", tuple(self.operators))
        object.__setattr__(self, "weights", tuple(self.weights))

    @property
    def drift(self) -> float:
        return float(self.tolerances.get("drift", 0.25))

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "seed": int(self.seed),
            "levels": list(self.levels),
            "family_size": int(self.family_size),
            "halfwidth": float(self.halfwidth),
            "operators": [copy.deepcopy(o) for o in self.operators],
            "inputs": copy.deepcopy(self.inputs),
            "symbols": copy.deepcopy(self.symbols),
            "weights": copy.deepcopy(list(self.weights)),
            "exponents": copy.deepcopy(self.exponents),
            "params": copy.deepcopy(self.params),
            "tolerances": copy.deepcopy(self.tolerances),
        }

    def canonical_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def sha256(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()

    @classmethod
    def from_dict(cls, data: dict, defaults: dict | None = None) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        unknown = set(data) - set(FIELDS)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "experiment" not in data:
            raise ConfigError("config needs an 'experiment' id")
        merged: dict[str, Any] = copy.deepcopy(defaults or {})
        for k, v in data.items():
            if k in ("params", "tolerances") and isinstance(v, dict):
                merged[k] = {**merged.get(k, {}), **copy.deepcopy(v)}
            else:
                merged[k] = copy.deepcopy(v)
        return cls(**merged)

    def with_overrides(self, seed: int | None = None, levels=None) -> "ExperimentConfig":
        d = self.to_dict()
        if seed is not None:
            d["seed"] = int(seed)
        if levels is not None:
            d["levels"] = list(levels)
        return ExperimentConfig(**d)


def load_config(path: str | Path, defaults: dict | None = None) -> ExperimentConfig:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return ExperimentConfig.from_dict(data, defaults)
