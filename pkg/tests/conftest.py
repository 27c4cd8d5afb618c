"""Shared fixtures: small seeded configurations and temporary image directories."""

import numpy as np
import pytest

from ternsense.commands import cmd_train
from ternsense.imaging import GrayImage, save_pgm
from ternsense.network import NetworkConfig
from ternsense.numerics import SeededRng
from ternsense.training import TrainConfig


def smooth_image(width: int, height: int, seed: int) -> GrayImage:
    """Low-frequency test image: a few random plane waves plus mild noise."""
    rng = SeededRng(seed)
    rows, cols = np.mgrid[0:height, 0:width]
    pixels = np.full((height, width), 128.0)
    for _ in range(3):
        fy, fx = rng.uniform(0.0, 0.3, size=2)
        phase = rng.uniform(0.0, 2.0 * np.pi)
        pixels += 30.0 * np.cos(fy * rows + fx * cols + phase)
    pixels += rng.uniform(-5.0, 5.0, size=(height, width))
    return GrayImage(np.rint(np.clip(pixels, 0.0, 255.0)))


@pytest.fixture
def tiny_network():
    """n=16, m=4, K=4, two hidden layers of 8 units."""
    return NetworkConfig(patch_side=4, sensing_rate=0.25, sparsity_ratio=0.25, hidden_layers=2, hidden_units=8)


@pytest.fixture
def small_network():
    """n=64, m=16, K=8, two hidden layers of 16 units."""
    return NetworkConfig(patch_side=8, sensing_rate=0.25, sparsity_ratio=0.125, hidden_layers=2, hidden_units=16)


@pytest.fixture
def small_training():
    return TrainConfig(epochs=2, batch_size=32, base_lr=0.01, seed=0)


@pytest.fixture
def image_dir(tmp_path):
    """Directory of three 24x20 grayscale PGM images."""
    directory = tmp_path / "images"
    directory.mkdir()
    for index in range(3):
        save_pgm(smooth_image(24, 20, seed=index), directory / f"img{index}.pgm")
    return directory


@pytest.fixture
def trained_model(tmp_path, image_dir, small_network, small_training):
    """Checkpoint trained briefly on image_dir."""
    out = tmp_path / "model.tcsm"
    cmd_train(image_dir, small_network, small_training, patches=128, out=out)
    return out
