"""Run configuration: strict YAML documents validated into :class:`RunConfig`."""

from __future__ import annotations

import ast
import math
import operator
from dataclasses import asdict, dataclass, field
from typing import List, Optional, Tuple

import numpy as np
import yaml

from .lattice import LatticeError, LatticeSpec
from .single_photon import ABSORBERS
from .two_photon import METRICS, SYMMETRIES

EXPERIMENTS = ("step-check", "evolve", "transport", "ensemble", "two-photon", "spectrum", "nonabelian")

_TOP_KEYS = {
    "experiment", "M", "flux", "rashba_angle", "steps", "start", "second_start",
    "absorber", "target", "disorder", "seed", "phi_grid", "realizations", "metric",
    "symmetries", "snapshot_stride", "out", "correlations",
}
_DISORDER_KEYS = {"delta", "deltas"}
_GRID_KEYS = {"start", "stop", "num", "endpoint"}


class ConfigError(ValueError):
    """Malformed or invalid run configuration."""


_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}


def parse_angle(value, key: str = "value") -> float:
    """A float, or an arithmetic expression in ``pi`` such as ``"pi/5"`` or ``"2*pi"``."""
    if isinstance(value, bool):
        raise ConfigError(f"{key}: expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if not isinstance(value, str):
        raise ConfigError(f"{key}: expected a number, got {value!r}")

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        raise ConfigError(f"{key}: unsupported expression {value!r}")

    try:
        return ev(ast.parse(value, mode="eval"))
    except SyntaxError as exc:
        raise ConfigError(f"{key}: cannot parse {value!r}") from exc
    except ZeroDivisionError as exc:
        raise ConfigError(f"{key}: division by zero in {value!r}") from exc


def _site(value, key: str) -> Tuple[int, int]:
    if not isinstance(value, (list, tuple)) or len(value) != 2 or not all(
        isinstance(v, int) and not isinstance(v, bool) for v in value
    ):
        raise ConfigError(f"{key}: expected a pair of integers [x, y], got {value!r}")
    return int(value[0]), int(value[1])


def _int(value, key: str, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise ConfigError(f"{key}: expected an integer >= {minimum}, got {value!r}")
    return value


def _grid(value) -> List[float]:
    if isinstance(value, dict):
        unknown = set(value) - _GRID_KEYS
        if unknown:
            raise ConfigError(f"phi_grid: unknown keys {sorted(unknown)}")
        try:
            start = parse_angle(value["start"], "phi_grid.start")
            stop = parse_angle(value["stop"], "phi_grid.stop")
            num = _int(value["num"], "phi_grid.num", 1)
        except KeyError as exc:
            raise ConfigError(f"phi_grid: missing key {exc.args[0]!r}") from None
        endpoint = bool(value.get("endpoint", True))
        return [float(v) for v in np.linspace(start, stop, num, endpoint=endpoint)]
    if isinstance(value, (list, tuple)):
        if not value:
            raise ConfigError("phi_grid: grid must not be empty")
        return [parse_angle(v, f"phi_grid[{i}]") for i, v in enumerate(value)]
    return [parse_angle(value, "phi_grid")]


@dataclass
class RunConfig:
    experiment: str
    M: int = 30
    flux: float = 0.0
    rashba_angle: Optional[float] = None
    steps: int = 20
    start: Optional[Tuple[int, int]] = None
    second_start: Tuple[int, int] = (1, 2)
    absorber: str = "projector"
    target: Optional[Tuple[int, int]] = None
    delta: float = 0.0
    deltas: List[float] = field(default_factory=list)
    seed: int = 0
    phi_grid: List[float] = field(default_factory=list)
    realizations: int = 1
    metric: str = "euclidean"
    symmetries: List[str] = field(default_factory=lambda: ["bosonic", "fermionic"])
    snapshot_stride: int = 0
    out: str = "out"
    correlations: bool = False

    def lattice(self, flux: Optional[float] = None) -> LatticeSpec:
        return LatticeSpec(self.M, self.flux if flux is None else flux, self.rashba_angle)

    def to_dict(self) -> dict:
        return asdict(self)

    def validate(self) -> "RunConfig":
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"experiment: must be one of {EXPERIMENTS}, got {self.experiment!r}")
        try:
            spec = LatticeSpec(self.M, self.flux, self.rashba_angle)
        except LatticeError as exc:
            raise ConfigError(f"M/flux: {exc}") from None
        M = spec.M
        if self.start is None:
            self.start = spec.center() if self.experiment == "evolve" else (1, 1)
        self.start = tuple(self.start)
        if self.target is None:
            self.target = (M, M)
        self.target = tuple(self.target)
        self.second_start = tuple(self.second_start)
        for key in ("start", "target", "second_start"):
            x, y = getattr(self, key)
            if not (1 <= x <= M and 1 <= y <= M):
                raise ConfigError(f"{key}: site ({x}, {y}) outside the lattice 1..{M}")
        if self.absorber not in ABSORBERS:
            raise ConfigError(f"absorber: must be one of {ABSORBERS}, got {self.absorber!r}")
        if self.metric not in METRICS:
            raise ConfigError(f"metric: must be one of {METRICS}, got {self.metric!r}")
        for s in self.symmetries:
            if s not in SYMMETRIES:
                raise ConfigError(f"symmetries: unknown symmetry {s!r}")
        if not self.symmetries:
            raise ConfigError("symmetries: must not be empty")
        if not self.delta >= 0 or any(not d >= 0 for d in self.deltas):
            raise ConfigError("disorder.delta: must be >= 0")
        if not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed: must be an unsigned 64-bit integer, got {self.seed}")
        if self.realizations < 1:
            raise ConfigError("realizations: must be >= 1")
        if self.experiment in ("two-photon", "spectrum", "transport") and not self.phi_grid:
            self.phi_grid = [self.flux]
        if self.experiment == "nonabelian":
            if self.rashba_angle is None:
                raise ConfigError("rashba_angle: required for the nonabelian experiment")
            if spec.flux != 0.0:
                raise ConfigError("flux: must be 0 for the nonabelian experiment")
        elif self.rashba_angle is not None:
            raise ConfigError("rashba_angle: only valid for the nonabelian experiment")
        if self.experiment == "two-photon" and "fermionic" in self.symmetries and self.start == self.second_start:
            raise ConfigError("start/second_start: fermions cannot share a site")
        return self


def config_from_mapping(doc: dict, experiment: Optional[str] = None) -> RunConfig:
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a mapping of keys to values")
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown keys: {sorted(unknown)}")
    exp = doc.get("experiment", experiment)
    if experiment is not None and exp != experiment:
        raise ConfigError(f"experiment: config says {exp!r} but {experiment!r} was requested")
    if exp is None:
        raise ConfigError("experiment: missing")
    kw = {"experiment": exp}
    if "M" in doc:
        kw["M"] = _int(doc["M"], "M", 2)
    if "flux" in doc:
        kw["flux"] = parse_angle(doc["flux"], "flux")
    if doc.get("rashba_angle") is not None:
        kw["rashba_angle"] = parse_angle(doc["rashba_angle"], "rashba_angle")
    if "steps" in doc:
        kw["steps"] = _int(doc["steps"], "steps", 1)
    for key in ("start", "second_start", "target"):
        if key in doc:
            kw[key] = _site(doc[key], key)
    for key, allowed in (("absorber", ABSORBERS), ("metric", METRICS)):
        if key in doc:
            if doc[key] not in allowed:
                raise ConfigError(f"{key}: must be one of {allowed}, got {doc[key]!r}")
            kw[key] = doc[key]
    if "disorder" in doc:
        d = doc["disorder"]
        if not isinstance(d, dict):
            raise ConfigError("disorder: expected a mapping with 'delta'")
        unknown = set(d) - _DISORDER_KEYS
        if unknown:
            raise ConfigError(f"disorder: unknown keys {sorted(unknown)}")
        if "delta" in d:
            kw["delta"] = parse_angle(d["delta"], "disorder.delta")
        if "deltas" in d:
            kw["deltas"] = [parse_angle(v, "disorder.deltas") for v in d["deltas"]]
    if "seed" in doc:
        kw["seed"] = _int(doc["seed"], "seed", 0)
    if "phi_grid" in doc:
        kw["phi_grid"] = _grid(doc["phi_grid"])
    if "realizations" in doc:
        kw["realizations"] = _int(doc["realizations"], "realizations", 1)
    if "symmetries" in doc:
        sy = doc["symmetries"]
        kw["symmetries"] = [sy] if isinstance(sy, str) else list(sy)
    if "snapshot_stride" in doc:
        kw["snapshot_stride"] = _int(doc["snapshot_stride"], "snapshot_stride", 0)
    if "out" in doc:
        kw["out"] = str(doc["out"])
    if "correlations" in doc:
        kw["correlations"] = bool(doc["correlations"])
    return RunConfig(**kw).validate()


def parse_config(text: str, experiment: Optional[str] = None) -> RunConfig:
    """Parse a YAML document into a validated :class:`RunConfig`.

    Unknown keys are rejected. Syntax errors report the line and column.
    """
    try:
        doc = yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark
        where = f"line {mark.line + 1}, column {mark.column + 1}" if mark else "unknown position"
        raise ConfigError(f"parse error at {where}: {exc.problem}") from None
    return config_from_mapping(doc, experiment)
