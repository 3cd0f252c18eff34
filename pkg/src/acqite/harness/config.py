"""Experiment configuration: a flat dataclass readable from key=value text or JSON.

Key=value schema (one per line, ``#`` starts a comment)::

    n = 4                 # qubits, 1..14
    J = 0.5
    h = 1.0
    boundary = open       # open | periodic
    method = acq          # ite | qite | acq | dbqite
    D = 2                 # QITE domain size
    dtau = 0.05
    policy = grid_line_search   # fixed | grid_line_search | newton | variance_bound
    refine = false
    newton_iters = 1
    max_steps = 200
    tau_max =             # ite only; empty means dtau * max_steps
    initial_state = all_zero    # all_zero | all_plus | random | comma-separated amplitudes
    seed = 0
    sequential = false
    out = results
"""
from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from ..acq import StepPolicy
from ..hamiltonian import MAX_EXACT_QUBITS, SpinChainModel, build_tfim
from ..statespace import StateVector

METHODS = ("ite", "qite", "acq", "dbqite")
NAMED_STATES = ("all_zero", "all_plus", "random")


class ConfigError(ValueError):
    """Invalid experiment configuration."""


@dataclass(frozen=True)
class ExperimentConfig:
    n: int = 4
    J: float = 0.5
    h: float = 1.0
    boundary: str = "open"
    method: str = "acq"
    D: int = 2
    dtau: float = 0.05
    policy: str = "grid_line_search"
    refine: bool = False
    newton_iters: int = 1
    max_steps: int = 200
    tau_max: float | None = None
    initial_state: str = "all_zero"
    seed: int = 0
    sequential: bool = False
    out: str = "results"

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if not 1 <= self.n <= MAX_EXACT_QUBITS:
            raise ConfigError(f"n must be in 1..{MAX_EXACT_QUBITS}, got {self.n}")
        if self.boundary not in ("open", "periodic"):
            raise ConfigError(f"boundary must be open or periodic, got {self.boundary!r}")
        if self.method not in METHODS:
            raise ConfigError(f"method must be one of {METHODS}, got {self.method!r}")
        if not self.dtau > 0:
            raise ConfigError(f"dtau must be positive, got {self.dtau}")
        if self.max_steps < 0:
            raise ConfigError("max_steps must be >= 0")
        if self.tau_max is not None and self.tau_max < 0:
            raise ConfigError("tau_max must be >= 0")
        coupled = self.n > 1 and self.J != 0
        if self.method in ("qite", "acq"):
            if coupled and self.D < 2:
                raise ConfigError(f"D must be >= 2 for a coupled chain, got D={self.D}")
            if self.D < 1:
                raise ConfigError("D must be >= 1")
        if self.policy not in StepPolicy.KINDS:
            raise ConfigError(f"policy must be one of {StepPolicy.KINDS}, got {self.policy!r}")
        if self.newton_iters < 1:
            raise ConfigError("newton_iters must be >= 1")
        if self.initial_state not in NAMED_STATES:
            amps = _parse_amplitudes(self.initial_state)
            if amps.shape != (1 << self.n,):
                raise ConfigError(f"initial_state has {amps.size} amplitudes, need {1 << self.n}")
            if np.linalg.norm(amps) == 0:
                raise ConfigError("initial_state amplitudes are all zero")

    # -- derived objects ------------------------------------------------------
    def model(self) -> SpinChainModel:
        return build_tfim(self.n, self.J, self.h, self.boundary)

    def step_policy(self) -> StepPolicy:
        return StepPolicy(self.policy, self.dtau, refine=self.refine, newton_iters=self.newton_iters)

    def initial(self) -> StateVector:
        if self.initial_state == "all_zero":
            return StateVector.all_zero(self.n)
        if self.initial_state == "all_plus":
            return StateVector.all_plus(self.n)
        if self.initial_state == "random":
            return StateVector.random(self.n, np.random.default_rng(self.seed))
        amps = _parse_amplitudes(self.initial_state)
        return StateVector(amps / np.linalg.norm(amps))

    def replace(self, **kw) -> "ExperimentConfig":
        return dataclasses.replace(self, **kw)

    def to_dict(self, with_out: bool = True) -> dict:
        d = dataclasses.asdict(self)
        if not with_out:
            d.pop("out")
        return d


def _parse_amplitudes(text: str) -> np.ndarray:
    try:
        return np.array([complex(tok.strip().replace(" ", "")) for tok in text.split(",")])
    except ValueError:
        raise ConfigError(f"initial_state must be one of {NAMED_STATES} or comma-separated "
                          f"amplitudes, got {text!r}") from None


_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def coerce(name: str, value):
    """Convert a raw text/JSON value to the type of field ``name``."""
    types = {f.name: f.type for f in fields(ExperimentConfig)}
    if name not in types:
        raise ConfigError(f"unknown config key {name!r}; valid keys: {', '.join(types)}")
    kind = types[name]
    if value is None or (isinstance(value, str) and value.strip() == ""):
        if "None" in str(kind):
            return None
        raise ConfigError(f"{name} needs a value")
    try:
        if kind == "bool":
            if isinstance(value, bool):
                return value
            v = str(value).strip().lower()
            if v in _TRUE:
                return True
            if v in _FALSE:
                return False
            raise ValueError(value)
        if kind == "int":
            if isinstance(value, float) and not value.is_integer():
                raise ValueError(value)
            return int(value)
        if kind.startswith("float"):
            return float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"bad value for {name} ({kind}): {value!r}") from None
    if isinstance(value, list):
        return ",".join(str(v) for v in value)
    return str(value).strip()


def parse_keyvalue(text: str) -> dict:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        out[key] = val
    return out


def load_config(path, **overrides) -> ExperimentConfig:
    """Read a config file (JSON if it parses as an object, else key=value)."""
    text = Path(path).read_text()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path}: invalid JSON: {e}") from None
    else:
        raw = parse_keyvalue(text)
    raw.update({k: v for k, v in overrides.items() if v is not None})
    return config_from_dict(raw)


def config_from_dict(raw: dict) -> ExperimentConfig:
    return ExperimentConfig(**{k: coerce(k, v) for k, v in raw.items()})
