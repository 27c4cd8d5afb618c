"""
Patch extraction, random sampling, normalization and overlap-average reassembly.
"""
import logging
from typing import Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ternsense.numerics import SeededRng
from .models import GrayImage, ImageError, NormalizationStats, PatchSet, PIXEL_MAX

logger = logging.getLogger(__name__)


def window_count(size: int, patch_side: int, stride: int) -> int:
    """Windows along one axis: floor((size - S) / stride) + 1, zero if S > size."""
    if patch_side > size:
        return 0
    return (size - patch_side) // stride + 1


def grid_origins(width: int, height: int, patch_side: int, stride: int) -> np.ndarray:
    """(row, col) origins (i * stride, j * stride) of every full window, row-major."""
    if stride < 1:
        raise ValueError(f"stride must be >= 1, got {stride}")
    if patch_side < 1 or patch_side > min(width, height):
        raise ImageError(f"patch side {patch_side} does not fit a {width}x{height} image")

    rows = window_count(height, patch_side, stride)
    cols = window_count(width, patch_side, stride)
    origin_rows, origin_cols = np.meshgrid(np.arange(rows) * stride, np.arange(cols) * stride, indexing="ij")
    return np.stack([origin_rows.ravel(), origin_cols.ravel()], axis=1)


def extract_patches(image: GrayImage, patch_side: int, stride: int) -> PatchSet:
    """All S x S windows whose origins lie on the stride grid."""
    origins = grid_origins(image.width, image.height, patch_side, stride)
    windows = sliding_window_view(image.pixels, (patch_side, patch_side))[::stride, ::stride]

    return PatchSet(
        patch_side=patch_side,
        origins=origins,
        vectors=windows.reshape(len(origins), patch_side * patch_side).copy(),
    )


def sample_random_patches(images: Sequence[GrayImage], patch_side: int, count: int, rng: SeededRng) -> PatchSet:
    """
    Draw count windows uniformly over every valid (image, origin) pair.

    Raises:
        ImageError: no image can hold an S x S window
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")

    per_row = np.array([window_count(img.width, patch_side, 1) for img in images], dtype=np.int64)
    per_image = per_row * np.array([window_count(img.height, patch_side, 1) for img in images], dtype=np.int64)
    total = int(per_image.sum())
    if total == 0:
        raise ImageError(f"no image is large enough for {patch_side}x{patch_side} patches")

    skipped = int(np.count_nonzero(per_image == 0))
    if skipped:
        logger.warning(f"{skipped} images are smaller than the patch side and were skipped")

    flat = rng.integers(0, total, size=count)
    offsets = np.concatenate([[0], np.cumsum(per_image)])
    sources = np.searchsorted(offsets, flat, side="right") - 1
    local = flat - offsets[sources]
    origins = np.stack([local // per_row[sources], local % per_row[sources]], axis=1)

    vectors = np.empty((count, patch_side * patch_side))
    for index in np.unique(sources):
        selected = np.flatnonzero(sources == index)
        windows = sliding_window_view(images[index].pixels, (patch_side, patch_side))
        vectors[selected] = windows[origins[selected, 0], origins[selected, 1]].reshape(len(selected), -1)

    return PatchSet(patch_side=patch_side, origins=origins, vectors=vectors, sources=sources)


def compute_stats(vectors) -> NormalizationStats:
    """Global mean and population standard deviation over every pixel of the corpus."""
    vectors = np.asarray(vectors, dtype=np.float64)
    mean = float(vectors.mean())
    std = float(vectors.std())
    if std == 0.0:
        logger.warning("Patch corpus is constant; using std=1 for normalization")
        std = 1.0
    return NormalizationStats(mean=mean, std=std)


def normalize(vectors, stats: NormalizationStats) -> np.ndarray:
    return (np.asarray(vectors, dtype=np.float64) - stats.mean) / stats.std


def denormalize(vectors, stats: NormalizationStats) -> np.ndarray:
    return np.asarray(vectors, dtype=np.float64) * stats.std + stats.mean


def overlap_average(patches: PatchSet, width: int, height: int) -> GrayImage:
    """
    Per-pixel mean of every patch covering it, clamped to [0, 255].

    Raises:
        ImageError: some pixel is covered by no patch
    """
    side = patches.patch_side
    sums = np.zeros(height * width)
    counts = np.zeros(height * width)
    blocks = patches.vectors.reshape(len(patches), side, side)
    column_offsets = np.arange(side)

    for dy in range(side):
        flat = (patches.origins[:, 0:1] + dy) * width + patches.origins[:, 1:2] + column_offsets
        sums += np.bincount(flat.ravel(), weights=blocks[:, dy, :].ravel(), minlength=height * width)
        counts += np.bincount(flat.ravel(), minlength=height * width)

    if np.any(counts == 0):
        uncovered = int(np.count_nonzero(counts == 0))
        raise ImageError(f"{uncovered} pixels are not covered by any patch")

    return GrayImage(np.clip(sums / counts, 0.0, PIXEL_MAX).reshape(height, width))
