"""Read images as grayscale, write 8-bit binary PGM."""

import logging
from pathlib import Path
from typing import List, Tuple

import numpy as np
from PIL import Image, UnidentifiedImageError

from .models import GrayImage, ImageError, PIXEL_MAX

logger = logging.getLogger(__name__)

IMAGE_SUFFIXES = (".pgm", ".pnm", ".png")
LUMA_WEIGHTS = (0.299, 0.587, 0.114)


def to_grayscale(r, g, b) -> GrayImage:
    """Luma 0.299 r + 0.587 g + 0.114 b of equal-size channels in [0, 255]."""
    r, g, b = (np.asarray(c, dtype=np.float64) for c in (r, g, b))
    if not r.shape == g.shape == b.shape:
        raise ImageError(f"channel sizes differ: {r.shape}, {g.shape}, {b.shape}")
    wr, wg, wb = LUMA_WEIGHTS
    luma = wr * r + wg * g + wb * b
    # the weights sum to one, so only rounding can step outside the range
    return GrayImage(np.clip(luma, 0.0, PIXEL_MAX))


def load_image(path) -> GrayImage:
    """
    Load an image file as grayscale.

    Single-channel 8-bit files are taken as they are; anything else is
    converted to RGB and reduced with to_grayscale.
    """
    path = Path(path)
    try:
        with Image.open(path) as image:
            if image.mode == "L":
                return GrayImage(np.asarray(image, dtype=np.float64))
            rgb = np.asarray(image.convert("RGB"), dtype=np.float64)
    except (OSError, UnidentifiedImageError) as error:
        raise ImageError(f"cannot read image: {error}", source=str(path)) from error
    return to_grayscale(rgb[..., 0], rgb[..., 1], rgb[..., 2])


def list_images(directory) -> List[Path]:
    """Image files of a directory, sorted by name."""
    directory = Path(directory)
    if not directory.is_dir():
        raise ImageError("not a readable directory", source=str(directory))
    return sorted(p for p in directory.iterdir() if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES)


def load_image_dir(directory) -> List[Tuple[str, GrayImage]]:
    """
    Load every image of a directory.

    Returns:
        (file name, image) pairs in name order

    Raises:
        ImageError: directory missing or holding no images
    """
    paths = list_images(directory)
    if not paths:
        raise ImageError(f"no images ({', '.join(IMAGE_SUFFIXES)}) found", source=str(directory))

    images = [(path.name, load_image(path)) for path in paths]
    logger.info(f"Loaded {len(images)} images from {directory}")
    return images


def save_pgm(image: GrayImage, path):
    """Write a binary (P5) PGM, rounding to the nearest integer level."""
    levels = np.clip(np.rint(image.pixels), 0.0, PIXEL_MAX).astype(np.uint8)
    Image.fromarray(levels).save(Path(path), format="PPM")
    logger.info(f"Wrote {image.width}x{image.height} image to {path}")
