"""
Image, patch and normalization types.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

PIXEL_MAX = 255.0


class ImageError(ValueError):
    """Image data that cannot be used: unreadable, too small, or not covered."""
    def __init__(self, reason: str, source: Optional[str] = None):
        self.reason = reason
        self.source = source
        super().__init__(f"{source}: {reason}" if source else reason)


@dataclass
class GrayImage:
    """Grayscale raster with pixels in [0, 255], stored as (height, width) float64."""
    pixels: np.ndarray

    def __post_init__(self):
        pixels = np.asarray(self.pixels, dtype=np.float64)
        if pixels.ndim != 2 or pixels.size == 0:
            raise ImageError(f"expected a non-empty 2-D raster, got shape {pixels.shape}")
        if not np.all(np.isfinite(pixels)) or pixels.min() < 0.0 or pixels.max() > PIXEL_MAX:
            raise ImageError("pixel values must lie in [0, 255]")
        self.pixels = pixels

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]


@dataclass
class PatchSet:
    """
    Vectorized S x S windows.

    origins holds (row, col) of each window's top-left pixel; vectors holds
    the raster scan of each window. sources, when set, is the index of the
    image each patch came from.
    """
    patch_side: int
    origins: np.ndarray
    vectors: np.ndarray
    sources: Optional[np.ndarray] = None

    def __len__(self) -> int:
        return self.vectors.shape[0]

    def with_vectors(self, vectors: np.ndarray) -> "PatchSet":
        """Same windows, new contents (e.g. reconstructions)."""
        vectors = np.asarray(vectors, dtype=np.float64)
        if vectors.shape != self.vectors.shape:
            raise ImageError(f"expected vectors of shape {self.vectors.shape}, got {vectors.shape}")
        return PatchSet(self.patch_side, self.origins, vectors, self.sources)


class NormalizationStats(BaseModel):
    """Corpus-global pixel mean and standard deviation."""
    model_config = ConfigDict(frozen=True)

    mean: float = 0.0
    std: float = Field(1.0, gt=0.0)
