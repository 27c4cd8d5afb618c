"""
Sensing layer plus reconstruction network.

    x (n) --theta_sb^T--> y (m) --alpha--> z (m) --[FC, BN, ReLU] x L--> FC --> x_hat (n)

The sensing layer has no bias and no activation. The output layer is linear
and is not batch-normalized.
"""
import logging
from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Tuple, Union

import numpy as np

from ternsense.numerics import DimensionError, SeededRng, SparseTernaryMatrix, ternary_matmat
from .layers import BatchNormCache, BatchNormLayer, DenseLayer, ScalingLayer, relu
from .models import NetworkConfig

logger = logging.getLogger(__name__)

# The ternary matrix, or a dense n x m array standing in for it when the
# sensing weights are treated as continuous (gradient checks).
SensingMatrix = Union[SparseTernaryMatrix, np.ndarray]


@dataclass
class HiddenBlock:
    dense: DenseLayer
    norm: BatchNormLayer


@dataclass
class ReconstructionNet:
    """Scaling layer, L hidden blocks and a linear output layer."""
    scaling: ScalingLayer
    hidden: List[HiddenBlock]
    output: DenseLayer
    # bumped by every parameter update; forward caches remember it
    version: int = 0

    @classmethod
    def initialize(cls, config: NetworkConfig, rng: SeededRng) -> "ReconstructionNet":
        hidden = []
        fan_in = config.m
        for _ in range(config.hidden_layers):
            hidden.append(HiddenBlock(
                dense=DenseLayer.initialize(fan_in, config.hidden_units, rng),
                norm=BatchNormLayer.initialize(config.hidden_units),
            ))
            fan_in = config.hidden_units

        return cls(
            scaling=ScalingLayer(alpha=np.ones(config.m)),
            hidden=hidden,
            output=DenseLayer.initialize(fan_in, config.n, rng),
        )

    @property
    def m(self) -> int:
        return self.scaling.alpha.shape[0]

    @property
    def n(self) -> int:
        return self.output.fan_out

    def parameters(self) -> Iterator[Tuple[str, object, str]]:
        """
        Yield (name, owner, attribute) for every gradient-trained tensor.

        alpha is excluded: it is derived from the sensing weights.
        """
        for i, block in enumerate(self.hidden):
            yield f"hidden.{i}.weights", block.dense, "weights"
            yield f"hidden.{i}.bias", block.dense, "bias"
            yield f"hidden.{i}.gamma", block.norm, "gamma"
            yield f"hidden.{i}.beta", block.norm, "beta"
        yield "output.weights", self.output, "weights"
        yield "output.bias", self.output, "bias"

    def dense_weights(self) -> Iterator[np.ndarray]:
        """Weight matrices carrying the l2 penalty."""
        for block in self.hidden:
            yield block.dense.weights
        yield self.output.weights


@dataclass
class ForwardCache:
    """Everything backward needs from one forward_train call."""
    x: np.ndarray
    theta_sb: SensingMatrix = field(repr=False)
    version: int
    measurements: np.ndarray
    scaled: np.ndarray
    block_inputs: List[np.ndarray] = field(default_factory=list)
    norm_caches: List[BatchNormCache] = field(default_factory=list)
    pre_activations: List[np.ndarray] = field(default_factory=list)
    output_input: Optional[np.ndarray] = None
    reconstruction: Optional[np.ndarray] = None


def sense(theta_sb: SensingMatrix, x) -> np.ndarray:
    """
    Measurements y = theta_sb^T x for one patch (n,) or a batch (B, n).

    No bias, no activation.
    """
    x = np.asarray(x, dtype=np.float64)
    batch = x[np.newaxis, :] if x.ndim == 1 else x

    if isinstance(theta_sb, SparseTernaryMatrix):
        y = ternary_matmat(theta_sb, batch)
    else:
        theta_sb = np.asarray(theta_sb, dtype=np.float64)
        if batch.ndim != 2 or batch.shape[1] != theta_sb.shape[0]:
            raise DimensionError("sense", f"patches of length {theta_sb.shape[0]}", f"shape {x.shape}")
        y = batch @ theta_sb

    return y[0] if x.ndim == 1 else y


def scale(alpha, y) -> np.ndarray:
    """Elementwise alpha_j * y_j."""
    return ScalingLayer(alpha=np.asarray(alpha, dtype=np.float64)).forward(np.asarray(y, dtype=np.float64))


def forward_train(net: ReconstructionNet, theta_sb: SensingMatrix, batch) -> Tuple[np.ndarray, ForwardCache]:
    """
    Training-mode pass using batch statistics.

    Updates every batch-norm layer's running statistics.

    Returns:
        (reconstructions of shape (B, n), cache for backward)
    """
    batch = np.asarray(batch, dtype=np.float64)
    if batch.ndim != 2 or batch.shape[0] < 2:
        raise ValueError(f"forward_train needs a (B, n) batch with B >= 2, got shape {batch.shape}")

    y = sense(theta_sb, batch)
    a = net.scaling.forward(y)
    cache = ForwardCache(x=batch, theta_sb=theta_sb, version=net.version, measurements=y, scaled=a)

    for block in net.hidden:
        cache.block_inputs.append(a)
        h = block.dense.forward(a)
        u, norm_cache = block.norm.forward_train(h)
        cache.norm_caches.append(norm_cache)
        cache.pre_activations.append(u)
        a = relu(u)

    cache.output_input = a
    cache.reconstruction = net.output.forward(a)
    return cache.reconstruction, cache


def forward_infer(net: ReconstructionNet, theta_sb: SensingMatrix, x) -> np.ndarray:
    """Inference pass with running statistics; pure and deterministic."""
    x = np.asarray(x, dtype=np.float64)
    return reconstruct_from_measurements(net, sense(theta_sb, x))


def reconstruct_from_measurements(net: ReconstructionNet, y) -> np.ndarray:
    """Run the reconstruction module alone on raw (unscaled) measurements."""
    y = np.asarray(y, dtype=np.float64)
    a = net.scaling.forward(y)
    for block in net.hidden:
        a = relu(block.norm.forward_infer(block.dense.forward(a)))
    return net.output.forward(a)
