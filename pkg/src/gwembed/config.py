"""Experiment configuration: one flat, JSON-serialisable record per run."""

from __future__ import annotations

import json
import re
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Any, Mapping, Optional

DATASETS = ("scurve", "swissroll", "sphere", "idx", "csv")
METHODS = ("gwmds", "mds", "classical-mds", "isomap", "pca")
METRICS = ("euclidean", "geodesic")
INITS = ("randn", "pca")
NORMALIZATIONS = ("none", "minmax", "zscore", "pixelmax")
GEODESIC_METHODS = ("gwmds", "isomap")


class ConfigError(ValueError):
    """Invalid or inconsistent configuration (a usage error)."""


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: str = "scurve"
    n: int = 400
    noise: float = 0.0
    path: Optional[str] = None
    max_items: Optional[int] = None
    subsample: Optional[int] = None
    data_seed: Optional[int] = None
    normalize: Optional[str] = None
    pixel_max: float = 255.0
    method: str = "gwmds"
    target_dim: int = 2
    metric: str = "euclidean"
    k: int = 10
    init: str = "pca"
    learning_rate: float = 0.1
    max_outer_iters: int = 500
    fw_max_iters: int = 200
    fw_tol: float = 1e-9
    convergence_tol: float = 1e-7
    mds_max_iters: int = 300
    seed: int = 0

    def __post_init__(self):
        def need(cond, msg):
            if not cond:
                raise ConfigError(msg)

        need(self.dataset in DATASETS, f"dataset must be one of {DATASETS}")
        need(self.method in METHODS, f"method must be one of {METHODS}")
        need(self.metric in METRICS, f"metric must be one of {METRICS}")
        need(self.init in INITS, f"init must be one of {INITS}")
        need(self.normalize is None or self.normalize in NORMALIZATIONS,
             f"normalize must be one of {NORMALIZATIONS}")
        need(self.dataset not in ("idx", "csv") or self.path, f"dataset {self.dataset!r} needs a path")
        need(self.n >= 1, "n must be >= 1")
        need(self.noise >= 0, "noise must be >= 0")
        need(self.target_dim >= 1, "target_dim must be >= 1")
        need(self.k >= 1, "k must be >= 1")
        need(self.learning_rate > 0, "learning_rate must be > 0")
        for name in ("max_outer_iters", "fw_max_iters", "mds_max_iters"):
            need(getattr(self, name) >= 1, f"{name} must be >= 1")
        need(self.fw_tol > 0 and self.convergence_tol > 0, "tolerances must be > 0")
        need(self.pixel_max > 0, "pixel_max must be > 0")
        for name in ("max_items", "subsample"):
            v = getattr(self, name)
            need(v is None or v >= 1, f"{name} must be >= 1")
        for name in ("seed", "data_seed"):
            v = getattr(self, name)
            need(v is None or 0 <= v < 2 ** 64, f"{name} must be a 64-bit unsigned integer")
        need(self.metric == "euclidean" or self.method in GEODESIC_METHODS,
             f"metric 'geodesic' is only supported by {GEODESIC_METHODS}")

    def resolved(self) -> "ExperimentConfig":
        """Copy with every ``None`` default replaced by its concrete value."""
        norm = self.normalize
        if norm is None:
            # IDX images are already divided by 255 when loaded
            norm = "minmax" if self.dataset in ("scurve", "swissroll", "sphere") else "none"
        data_seed = self.seed if self.data_seed is None else self.data_seed
        # Isomap is defined on geodesic distances whatever the flag says
        metric = "geodesic" if self.method == "isomap" else self.metric
        return replace(self, normalize=norm, data_seed=data_seed, metric=metric)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ExperimentConfig":
        """Build from a flat mapping; camelCase keys are accepted too."""
        known = {f.name for f in fields(cls)}
        kwargs = {}
        for key, value in data.items():
            name = _snake(key)
            if name not in known:
                raise ConfigError(f"unknown config field {key!r}")
            kwargs[name] = value
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc


def _snake(key: str) -> str:
    return re.sub(r"(?<=[a-z0-9])([A-Z])", r"_\1", key).lower().replace("-", "_")


def load_config_file(path) -> dict:
    """Read a flat JSON object; returned raw so callers can layer overrides."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected a JSON object")
    return data
