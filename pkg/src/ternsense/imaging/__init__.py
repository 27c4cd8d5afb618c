"""Grayscale images, patches and PSNR evaluation."""
from .models import GrayImage, ImageError, NormalizationStats, PatchSet
from .io import list_images, load_image, load_image_dir, save_pgm, to_grayscale
from .patches import (
    compute_stats,
    denormalize,
    extract_patches,
    grid_origins,
    normalize,
    overlap_average,
    sample_random_patches,
    window_count,
)
from .metrics import format_psnr, psnr

__all__ = [
    "GrayImage",
    "ImageError",
    "NormalizationStats",
    "PatchSet",
    "list_images",
    "load_image",
    "load_image_dir",
    "save_pgm",
    "to_grayscale",
    "compute_stats",
    "denormalize",
    "extract_patches",
    "grid_origins",
    "normalize",
    "overlap_average",
    "sample_random_patches",
    "window_count",
    "format_psnr",
    "psnr",
]
