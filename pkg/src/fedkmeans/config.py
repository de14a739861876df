"""Flat experiment configuration with a YAML on-disk form."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any

import yaml

__all__ = ["ConfigError", "ExperimentConfig", "load_config", "dump_config", "parse_data_spec"]

PARTITIONS = ("iid", "by-label", "contiguous")
MODES = ("jacobi", "gauss-seidel")
INITS = ("kmeanspp", "local_lloyd", "shared", "explicit")


class ConfigError(ValueError):
    """Invalid configuration; ``field`` names the offending key."""

    def __init__(self, field: str, message: str) -> None:
        super().__init__(f"{field}: {message}")
        self.field = field


@dataclass
class ExperimentConfig:
    # data
    data: str = "blobs"
    blobs_k: int = 3
    blobs_d: int = 2
    blobs_spread: float = 0.5
    blobs_points: int = 100
    blobs_separation: float = 10.0
    csv_path: str | None = None
    csv_device_column: bool = False
    csv_skip_header: bool = False
    partition: str = "iid"
    # by-label only: blob label -> list of 1-based device ids
    label_map: dict[int, list[int]] | None = None
    n_devices: int = 6
    # graph: ring | complete | random:P | file:PATH
    graph: str = "complete"
    graph_seed: int | None = None
    graph_max_tries: int = 100
    # method
    k: int = 3
    alpha: float = 1.0
    seed: int = 0
    init: str = "local_lloyd"
    init_centroids: list[list[float]] | None = None
    inner_max_iter: int = 50
    inner_tol: float = 1e-6
    rounds_max: int = 30
    round_tol: float = 1e-6
    mode: str = "jacobi"
    baseline_restarts: int = 10
    out: str = "runs/default"

    def validate(self) -> ExperimentConfig:
        if self.data not in ("blobs", "csv"):
            raise ConfigError("data", f"must be 'blobs' or 'csv', got {self.data!r}")
        if self.data == "csv":
            if not self.csv_path:
                raise ConfigError("csv_path", "required when data is 'csv'")
            if not Path(self.csv_path).is_file():
                raise ConfigError("csv_path", f"file not found: {self.csv_path}")
        else:
            for name in ("blobs_k", "blobs_d"):
                if getattr(self, name) < 1:
                    raise ConfigError(name, "must be >= 1")
            if self.blobs_points < 0:
                raise ConfigError("blobs_points", "must be >= 0")
            if not self.blobs_spread > 0:
                raise ConfigError("blobs_spread", "must be positive")
        if self.partition not in PARTITIONS:
            raise ConfigError("partition", f"must be one of {PARTITIONS}, got {self.partition!r}")
        if self.partition == "by-label" and self.data == "csv" and not self.csv_device_column:
            raise ConfigError("partition", "by-label needs ground-truth labels (synthetic data only)")
        if self.n_devices < 1:
            raise ConfigError("n_devices", "must be >= 1")
        if self.label_map is not None:
            if not isinstance(self.label_map, dict):
                raise ConfigError("label_map", "must map labels to lists of device ids")
            for lab, devs in self.label_map.items():
                devs = devs if isinstance(devs, list) else [devs]
                if not devs or any(not isinstance(v, int) or not 1 <= v <= self.n_devices for v in devs):
                    raise ConfigError("label_map", f"label {lab} maps to devices outside 1..{self.n_devices}")
        kind, _, arg = self.graph.partition(":")
        if kind not in ("ring", "complete", "random", "file"):
            raise ConfigError("graph", f"unknown topology {self.graph!r}")
        if kind == "random":
            try:
                p = float(arg)
            except ValueError:
                raise ConfigError("graph", f"random needs a probability, got {arg!r}") from None
            if not 0.0 <= p <= 1.0:
                raise ConfigError("graph", f"edge probability {p} outside [0, 1]")
        if kind == "file" and not Path(arg).is_file():
            raise ConfigError("graph", f"edge-list file not found: {arg}")
        if self.k < 1:
            raise ConfigError("k", "must be >= 1")
        if self.alpha < 0:
            raise ConfigError("alpha", "must be nonnegative")
        if self.init not in INITS:
            raise ConfigError("init", f"must be one of {INITS}, got {self.init!r}")
        if self.init == "explicit":
            if not self.init_centroids or len(self.init_centroids) != self.k:
                raise ConfigError("init_centroids", f"explicit init needs {self.k} centroids")
        if self.inner_max_iter < 1:
            raise ConfigError("inner_max_iter", "must be >= 1")
        if self.rounds_max < 1:
            raise ConfigError("rounds_max", "must be >= 1")
        for name in ("inner_tol", "round_tol"):
            if getattr(self, name) < 0:
                raise ConfigError(name, "must be nonnegative")
        if self.mode not in MODES:
            raise ConfigError("mode", f"must be one of {MODES}, got {self.mode!r}")
        if self.baseline_restarts < 1:
            raise ConfigError("baseline_restarts", "must be >= 1")
        return self

    def replace(self, **changes: Any) -> ExperimentConfig:
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)


_FIELD_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}


def _coerce(name: str, value: Any) -> Any:
    if value is None:
        return None
    kind = _FIELD_TYPES[name]
    try:
        if kind == "int" or kind == "int | None":
            if isinstance(value, bool) or (isinstance(value, float) and not value.is_integer()):
                raise ValueError
            return int(value)
        if kind == "float":
            if isinstance(value, bool):
                raise ValueError
            return float(value)
        if kind == "bool":
            if not isinstance(value, bool):
                raise ValueError
            return value
        if kind == "str" or kind == "str | None":
            return str(value)
    except (TypeError, ValueError):
        raise ConfigError(name, f"cannot interpret {value!r} as {kind}") from None
    return value


def from_mapping(values: dict[str, Any], base: ExperimentConfig | None = None) -> ExperimentConfig:
    cfg = dataclasses.replace(base) if base is not None else ExperimentConfig()
    for key, value in values.items():
        if key not in _FIELD_TYPES:
            raise ConfigError(key, "unknown configuration key")
        setattr(cfg, key, _coerce(key, value))
    return cfg


def load_config(path: str | Path) -> ExperimentConfig:
    with open(path) as fh:
        values = yaml.safe_load(fh) or {}
    if not isinstance(values, dict):
        raise ConfigError("<file>", f"{path} is not a key-value document")
    return from_mapping(values)


def dump_config(cfg: ExperimentConfig, path: str | Path) -> None:
    with open(path, "w") as fh:
        yaml.safe_dump(cfg.to_dict(), fh, sort_keys=False, default_flow_style=False)


_BLOB_KEYS = {
    "k": "blobs_k",
    "d": "blobs_d",
    "spread": "blobs_spread",
    "points": "blobs_points",
    "sep": "blobs_separation",
}


def parse_data_spec(text: str) -> dict[str, Any]:
    """``blobs[:k=3,d=2,spread=0.5,points=100,sep=10]`` or ``csv:PATH``."""
    kind, _, rest = text.partition(":")
    if kind == "csv":
        if not rest:
            raise ConfigError("data", "csv needs a path, e.g. csv:points.csv")
        return {"data": "csv", "csv_path": rest}
    if kind != "blobs":
        raise ConfigError("data", f"unknown data source {text!r}")
    out: dict[str, Any] = {"data": "blobs"}
    for item in filter(None, rest.split(",")):
        key, sep, value = item.partition("=")
        if not sep or key not in _BLOB_KEYS:
            raise ConfigError("data", f"bad blobs parameter {item!r}; keys are {sorted(_BLOB_KEYS)}")
        out[_BLOB_KEYS[key]] = yaml.safe_load(value)
    return out
