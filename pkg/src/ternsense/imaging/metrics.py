"""Reconstruction quality metrics."""

import math

import numpy as np

from ternsense.numerics import DimensionError
from .models import GrayImage, PIXEL_MAX


def mean_squared_error(reference: GrayImage, test: GrayImage) -> float:
    if reference.pixels.shape != test.pixels.shape:
        raise DimensionError("psnr", reference.pixels.shape, test.pixels.shape)
    residual = reference.pixels - test.pixels
    return float(np.mean(residual * residual))


def psnr(reference: GrayImage, test: GrayImage) -> float:
    """
    Peak signal-to-noise ratio in dB with peak 255.

    Returns math.inf for identical images.
    """
    mse = mean_squared_error(reference, test)
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(PIXEL_MAX ** 2 / mse)


def format_psnr(value: float) -> str:
    """Two decimals, or "inf"."""
    return "inf" if math.isinf(value) else f"{value:.2f}"
