"""Layer building blocks of the reconstruction module."""

import logging
from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np

from ternsense.numerics import DimensionError, SeededRng

logger = logging.getLogger(__name__)

BN_EPSILON = 1e-5
BN_MOMENTUM = 0.9


@dataclass
class ScalingLayer:
    """Per-measurement factors alpha, set from the sensing weights, never trained."""
    alpha: np.ndarray

    def forward(self, y: np.ndarray) -> np.ndarray:
        if y.shape[-1] != self.alpha.shape[0]:
            raise DimensionError("scale", f"{self.alpha.shape[0]} measurements", f"{y.shape[-1]}")
        return y * self.alpha


@dataclass
class DenseLayer:
    """Fully connected layer, x @ weights + bias."""
    weights: np.ndarray
    bias: np.ndarray

    @classmethod
    def initialize(cls, fan_in: int, fan_out: int, rng: SeededRng) -> "DenseLayer":
        """Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, zero bias."""
        bound = 1.0 / np.sqrt(fan_in)
        return cls(
            weights=rng.uniform(-bound, bound, size=(fan_in, fan_out)),
            bias=np.zeros(fan_out),
        )

    @property
    def fan_in(self) -> int:
        return self.weights.shape[0]

    @property
    def fan_out(self) -> int:
        return self.weights.shape[1]

    def forward(self, x: np.ndarray) -> np.ndarray:
        return x @ self.weights + self.bias

    def backward(self, grad_out: np.ndarray, x: np.ndarray) -> Tuple[np.ndarray, Dict[str, np.ndarray]]:
        """
        Args:
            grad_out: dL/d(output), shape (B, fan_out)
            x: Input seen by forward, shape (B, fan_in)

        Returns:
            (dL/dx, {"weights": dL/dW, "bias": dL/db})
        """
        grads = {
            "weights": x.T @ grad_out,
            "bias": grad_out.sum(axis=0),
        }
        return grad_out @ self.weights.T, grads


@dataclass
class BatchNormCache:
    """Intermediates of a batch-statistics forward pass."""
    x_hat: np.ndarray
    inv_std: np.ndarray


@dataclass
class BatchNormLayer:
    """
    Per-unit batch normalization with a learned affine map.

    Training normalizes with the batch mean and biased batch variance and
    folds them into the running statistics:

        running = momentum * running + (1 - momentum) * batch
    """
    gamma: np.ndarray
    beta: np.ndarray
    running_mean: np.ndarray
    running_var: np.ndarray
    momentum: float = BN_MOMENTUM
    epsilon: float = BN_EPSILON

    @classmethod
    def initialize(cls, units: int) -> "BatchNormLayer":
        return cls(
            gamma=np.ones(units),
            beta=np.zeros(units),
            running_mean=np.zeros(units),
            running_var=np.ones(units),
        )

    def forward_train(self, h: np.ndarray) -> Tuple[np.ndarray, BatchNormCache]:
        mean = h.mean(axis=0)
        var = h.var(axis=0)
        inv_std = 1.0 / np.sqrt(var + self.epsilon)
        x_hat = (h - mean) * inv_std

        self.running_mean = self.momentum * self.running_mean + (1.0 - self.momentum) * mean
        self.running_var = self.momentum * self.running_var + (1.0 - self.momentum) * var

        return self.gamma * x_hat + self.beta, BatchNormCache(x_hat=x_hat, inv_std=inv_std)

    def forward_infer(self, h: np.ndarray) -> np.ndarray:
        x_hat = (h - self.running_mean) / np.sqrt(self.running_var + self.epsilon)
        return self.gamma * x_hat + self.beta

    def backward(self, grad_out: np.ndarray, cache: BatchNormCache) -> Tuple[np.ndarray, Dict[str, np.ndarray]]:
        """Gradient through the batch-statistics path, including mean and variance."""
        batch = grad_out.shape[0]
        grads = {
            "gamma": np.sum(grad_out * cache.x_hat, axis=0),
            "beta": grad_out.sum(axis=0),
        }
        grad_x_hat = grad_out * self.gamma
        grad_h = (cache.inv_std / batch) * (
            batch * grad_x_hat
            - grad_x_hat.sum(axis=0)
            - cache.x_hat * np.sum(grad_x_hat * cache.x_hat, axis=0)
        )
        return grad_h, grads


def relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0)
