"""Single-run orchestration shared by the CLI commands."""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import baselines
from .config import ExperimentConfig
from .datasets import load_dataset
from .evaluation import pearson_distance_correlation, stress
from .gwmds import gw_mds, init_embedding, input_distances
from .metrics import normalize_features, pairwise_euclidean
from .types import DistanceMatrix, Embedding, PointCloud


@dataclass
class RunResult:
    config: ExperimentConfig
    cloud: PointCloud
    color: Optional[np.ndarray]
    dist_x: DistanceMatrix
    embedding: Embedding
    metrics: dict


def prepare(config: ExperimentConfig):
    """Load and normalise the data of a resolved config."""
    cloud, color = load_dataset(config)
    return normalize_features(cloud, config.normalize, config.pixel_max), color


def embed(config: ExperimentConfig, cloud: PointCloud, dist_x: DistanceMatrix) -> Embedding:
    method = config.method
    d = config.target_dim
    if method == "gwmds":
        y0 = init_embedding(cloud, d, config.init, config.seed)
        return gw_mds(dist_x, y0, learning_rate=config.learning_rate,
                      max_iter=config.max_outer_iters, tol=config.convergence_tol,
                      fw_max_iter=config.fw_max_iters, fw_tol=config.fw_tol)
    if method == "mds":
        return baselines.metric_mds(dist_x, d, config.mds_max_iters, config.seed)
    if method == "classical-mds":
        return baselines.classical_mds(dist_x, d)
    if method == "isomap":
        # dist_x is already the geodesic matrix, so this is the last Isomap stage
        return baselines.classical_mds(dist_x, d)
    if method == "pca":
        return baselines.pca(cloud, d)
    raise ValueError(f"unknown method {method!r}")


def run(config: ExperimentConfig) -> RunResult:
    """Resolve, load, embed and score one configuration."""
    cfg = config.resolved()
    t0 = time.perf_counter()
    cloud, color = prepare(cfg)
    dist_x = input_distances(cloud, cfg.metric, cfg.k)
    emb = embed(cfg, cloud, dist_x)
    runtime = time.perf_counter() - t0
    dist_y = pairwise_euclidean(emb.coords)
    metrics = {
        "method": cfg.method,
        "n": cloud.n,
        "p": cloud.p,
        "stress": stress(dist_x, dist_y),
        "pearson": pearson_distance_correlation(dist_x, dist_y),
    }
    if cfg.metric == "geodesic":
        metrics["pearson_euclidean"] = pearson_distance_correlation(pairwise_euclidean(cloud), dist_y)
    if emb.loss_trace:
        metrics["initial_cost"] = emb.loss_trace[0][1]
        metrics["final_cost"] = emb.loss_trace[-1][1]
        metrics["iterations"] = emb.loss_trace[-1][0]
    if "converged" in emb.info:
        metrics["converged"] = bool(emb.info["converged"])
    metrics["runtime_seconds"] = runtime
    metrics["config"] = cfg.to_dict()
    return RunResult(cfg, cloud, color, dist_x, emb, metrics)
