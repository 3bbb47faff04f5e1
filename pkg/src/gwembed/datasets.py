"""Toy manifolds and loaders for image (IDX) and matrix (CSV) data."""

from __future__ import annotations

import csv
import struct
from pathlib import Path
from typing import Optional, Tuple

import numpy as np

from .errors import BadMagicError, NonNumericCellError, RaggedRowsError, TruncatedFileError
from .types import PointCloud

IDX3_MAGIC = 0x00000803
_IDX_HEADER = struct.Struct(">iiii")


def generate_s_curve(n: int, noise: float = 0.0, seed: int = 0) -> Tuple[PointCloud, np.ndarray]:
    """S-shaped surface in R^3, parametrised by ``t`` in (-3pi/2, 3pi/2) and a width ``y`` in (0, 2).

    Returns the cloud and ``t`` (for colouring).
    """
    rng = np.random.default_rng(seed)
    t = rng.uniform(-1.5 * np.pi, 1.5 * np.pi, n)
    y = rng.uniform(0.0, 2.0, n)
    x = np.column_stack([np.sin(t), y, np.sign(t) * (np.cos(t) - 1.0)])
    if noise > 0:
        x = x + noise * rng.standard_normal(x.shape)
    return PointCloud(x), t


def generate_swiss_roll(n: int, noise: float = 0.0, seed: int = 0) -> Tuple[PointCloud, np.ndarray]:
    """Spiral ``(t cos t, y, t sin t)`` with ``t`` in (1.5pi, 4.5pi) and ``y`` in (0, 21)."""
    rng = np.random.default_rng(seed)
    t = rng.uniform(1.5 * np.pi, 4.5 * np.pi, n)
    y = rng.uniform(0.0, 21.0, n)
    x = np.column_stack([t * np.cos(t), y, t * np.sin(t)])
    if noise > 0:
        x = x + noise * rng.standard_normal(x.shape)
    return PointCloud(x), t


def generate_sphere(n: int, seed: int = 0) -> Tuple[PointCloud, np.ndarray]:
    """Uniform sample of the unit sphere; the colour is the polar angle."""
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n, 3))
    x = g / np.linalg.norm(g, axis=1, keepdims=True)
    return PointCloud(x), np.arccos(np.clip(x[:, 2], -1.0, 1.0))


def read_idx_header(path) -> Tuple[int, int, int]:
    """``(count, rows, cols)`` from an IDX3 image file header."""
    with open(path, "rb") as fh:
        head = fh.read(_IDX_HEADER.size)
    if len(head) < _IDX_HEADER.size:
        raise TruncatedFileError(f"{path}: file shorter than the 16-byte IDX header")
    magic, count, rows, cols = _IDX_HEADER.unpack(head)
    if magic != IDX3_MAGIC:
        raise BadMagicError(f"{path}: bad magic 0x{magic & 0xFFFFFFFF:08x}, expected 0x{IDX3_MAGIC:08x}")
    return count, rows, cols


def load_idx_images(path, max_items: Optional[int] = None) -> PointCloud:
    """Read an IDX3 (MNIST-style) image file into a cloud of flattened images.

    Pixels are unsigned bytes divided by 255, so every entry is in [0, 1];
    each image is flattened row-major into ``rows * cols`` features. Only
    the first ``max_items`` images are kept when given.
    """
    count, rows, cols = read_idx_header(path)
    size = rows * cols
    data = Path(path).read_bytes()[_IDX_HEADER.size:]
    if len(data) < count * size:
        raise TruncatedFileError(
            f"{path}: expected {count * size} pixel bytes for {count} images, found {len(data)}")
    keep = count if max_items is None else min(count, max_items)
    pixels = np.frombuffer(data, dtype=np.uint8, count=keep * size)
    return PointCloud(pixels.reshape(keep, size).astype(np.float64) / 255.0)


def write_idx_images(path, images: np.ndarray) -> None:
    """Write a ``(count, rows, cols)`` uint8 array as an IDX3 file."""
    images = np.asarray(images, dtype=np.uint8)
    count, rows, cols = images.shape
    with open(path, "wb") as fh:
        fh.write(_IDX_HEADER.pack(IDX3_MAGIC, count, rows, cols))
        fh.write(images.tobytes(order="C"))


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def load_matrix_csv(path) -> PointCloud:
    """Numeric comma-separated matrix, one sample per row.

    A first row containing any non-numeric cell is treated as a header.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if rows and not all(_is_number(c) for c in rows[0]):
        rows = rows[1:]
    if not rows:
        raise RaggedRowsError(f"{path}: no data rows")
    width = len(rows[0])
    out = np.empty((len(rows), width))
    for i, row in enumerate(rows):
        if len(row) != width:
            raise RaggedRowsError(f"{path}: row {i + 1} has {len(row)} cells, expected {width}")
        for j, cell in enumerate(row):
            try:
                out[i, j] = float(cell)
            except ValueError:
                raise NonNumericCellError(f"{path}: non-numeric cell {cell!r} at row {i + 1}, column {j + 1}") from None
    return PointCloud(out)


def subsample(cloud: PointCloud, m: int, seed: int = 0) -> PointCloud:
    """``m`` rows drawn without replacement, kept in their original order."""
    x = np.asarray(cloud)
    if m >= x.shape[0]:
        return cloud
    idx = np.sort(np.random.default_rng(seed).choice(x.shape[0], size=m, replace=False))
    return PointCloud(x[idx])


def load_dataset(config) -> Tuple[PointCloud, Optional[np.ndarray]]:
    """Build the (un-normalised) cloud described by a resolved config, with its colour parameter if any."""
    seed = config.seed if config.data_seed is None else config.data_seed
    if config.dataset == "scurve":
        return generate_s_curve(config.n, config.noise, seed)
    if config.dataset == "swissroll":
        return generate_swiss_roll(config.n, config.noise, seed)
    if config.dataset == "sphere":
        return generate_sphere(config.n, seed)
    if config.dataset == "idx":
        cloud = load_idx_images(config.path, config.max_items)
    else:
        cloud = load_matrix_csv(config.path)
        if config.max_items is not None:
            cloud = PointCloud(np.asarray(cloud)[: config.max_items])
    if config.subsample is not None:
        cloud = subsample(cloud, config.subsample, seed)
    return cloud, None
