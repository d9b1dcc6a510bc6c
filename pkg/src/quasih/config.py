"""Scenario configuration (one JSON document) and its validation."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .dynamics import StateH1, Trajectory
from .model import ModelParams, Unitary2, random_unitary2


class ConfigError(ValueError):
    """Invalid scenario; ``where`` names the offending field or JSON line."""

    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where
        self.message = message


@dataclass
class ModelConfig:
    nu: float = 1.0
    g: float = 1.0
    kappa: float = 0.6
    n_bath: int = 1
    x: float = 1.0


@dataclass
class InitialConfig:
    mode: str = "alpha"
    A_re: float = 0.0
    A_im: float = 0.0
    B_re: float = 0.0
    B_im: float = 0.0
    alpha: float = 0.5
    phase1: float = 0.0
    phase2: float = 0.0


@dataclass
class UnitaryConfig:
    mode: str = "real_cd"
    entries: dict | None = None
    c: float = 0.0
    seed: int = 0


@dataclass
class GridConfig:
    t_max: float | None = None
    samples: int = 4097


@dataclass
class OutputConfig:
    path: str | None = None
    format: str | None = None


@dataclass
class SweepConfig:
    param: str = "alpha"
    values: list = field(default_factory=list)


_SECTIONS = {
    "model": ModelConfig,
    "initial": InitialConfig,
    "unitary": UnitaryConfig,
    "grid": GridConfig,
    "output": OutputConfig,
    "sweep": SweepConfig,
}


def _section(name: str, cls, raw):
    if raw is None:
        return cls()
    if not isinstance(raw, dict):
        raise ConfigError(name, "must be a JSON object")
    known = {f.name: f for f in fields(cls)}
    kwargs = {}
    for key, value in raw.items():
        if key not in known:
            raise ConfigError(f"{name}.{key}", "unknown field")
        kwargs[key] = value
    obj = cls(**kwargs)
    for key, f in known.items():
        value = getattr(obj, key)
        where = f"{name}.{key}"
        if value is None or key in ("mode", "format", "param", "path", "entries"):
            continue
        if key == "values":
            if not isinstance(value, list) or not all(_is_number(v) for v in value):
                raise ConfigError(where, "must be a list of numbers")
            continue
        if key in ("n_bath", "samples", "seed"):
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigError(where, f"must be an integer, got {value!r}")
            continue
        if not _is_number(value):
            raise ConfigError(where, f"must be a number, got {value!r}")
    return obj


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


@dataclass
class ScenarioConfig:
    model: ModelConfig = field(default_factory=ModelConfig)
    initial: InitialConfig = field(default_factory=InitialConfig)
    unitary: UnitaryConfig = field(default_factory=UnitaryConfig)
    grid: GridConfig = field(default_factory=GridConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    sweep: SweepConfig | None = None

    @classmethod
    def from_dict(cls, raw: dict) -> "ScenarioConfig":
        if not isinstance(raw, dict):
            raise ConfigError("<root>", "config must be a JSON object")
        for key in raw:
            if key not in _SECTIONS:
                raise ConfigError(key, "unknown section")
        parts = {name: _section(name, kind, raw.get(name)) for name, kind in _SECTIONS.items()}
        if "sweep" not in raw:
            parts["sweep"] = None
        cfg = cls(**parts)
        cfg.validate()
        return cfg

    @classmethod
    def from_json(cls, text: str) -> "ScenarioConfig":
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"line {exc.lineno} column {exc.colno}", exc.msg) from None
        return cls.from_dict(raw)

    def to_dict(self) -> dict:
        out = {name: asdict(getattr(self, name)) for name in _SECTIONS if getattr(self, name) is not None}
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    # ------------------------------------------------------------------

    def validate(self) -> None:
        """Build every physical object once so invalid input fails before any output."""
        if self.initial.mode not in ("amplitudes", "alpha"):
            raise ConfigError("initial.mode", "must be 'amplitudes' or 'alpha'")
        if self.unitary.mode not in ("matrix", "real_cd", "random"):
            raise ConfigError("unitary.mode", "must be 'matrix', 'real_cd' or 'random'")
        if self.output.format not in (None, "csv", "json"):
            raise ConfigError("output.format", "must be 'csv' or 'json'")
        if self.grid.samples < 64:
            raise ConfigError("grid.samples", "must be at least 64")
        if self.grid.t_max is not None and not self.grid.t_max > 0:
            raise ConfigError("grid.t_max", "must be positive")
        if self.sweep is not None:
            if self.sweep.param not in ("alpha", "c"):
                raise ConfigError("sweep.param", "must be 'alpha' or 'c'")
            if not self.sweep.values:
                raise ConfigError("sweep.values", "must not be empty")
            if self.sweep.param == "alpha" and self.initial.mode != "alpha":
                raise ConfigError("sweep.param", "an alpha sweep needs initial.mode = 'alpha'")
            for v in self.sweep.values:
                self.trajectory(**{self.sweep.param: v})
        self.trajectory()

    def params(self) -> ModelParams:
        m = self.model
        try:
            return ModelParams(m.nu, m.g, m.kappa, m.n_bath, m.x, m.x)
        except ValueError as exc:
            msg = str(exc)
            key = next((k for k in ("nu", "g", "kappa", "n_bath") if msg.lstrip("|").startswith(k)), "x")
            raise ConfigError(f"model.{key}", msg) from None

    def unitary_for(self, c: float | None = None) -> Unitary2:
        u = self.unitary
        try:
            if c is not None or u.mode == "real_cd":
                return Unitary2.real_cd(u.c if c is None else c)
            if u.mode == "random":
                return random_unitary2(u.seed)
            if not isinstance(u.entries, dict) or set(u.entries) != set("abcd"):
                raise ConfigError("unitary.entries", "needs keys a, b, c, d as [re, im] pairs")
            vals = {}
            for k, pair in u.entries.items():
                if not (isinstance(pair, list) and len(pair) == 2 and all(_is_number(v) for v in pair)):
                    raise ConfigError(f"unitary.entries.{k}", "must be a [re, im] pair")
                vals[k] = complex(pair[0], pair[1])
            return Unitary2(**vals)
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError("unitary", str(exc)) from None

    def trajectory(self, alpha: float | None = None, c: float | None = None) -> Trajectory:
        p = self.params()
        ini = self.initial
        try:
            if ini.mode == "alpha" or alpha is not None:
                state = StateH1.from_alpha(p, ini.alpha if alpha is None else alpha, ini.phase1, ini.phase2)
            else:
                state = StateH1.normalized(p, complex(ini.A_re, ini.A_im), complex(ini.B_re, ini.B_im))
            return Trajectory(p, state, self.unitary_for(c))
        except ConfigError:
            raise
        except ValueError as exc:
            where = "initial.alpha" if "alpha" in str(exc) else "initial"
            raise ConfigError(where, str(exc)) from None

    def times(self, traj: Trajectory) -> np.ndarray:
        t_max = self.grid.t_max if self.grid.t_max is not None else 2 * math.pi / traj.omega
        return np.linspace(0.0, t_max, self.grid.samples)
