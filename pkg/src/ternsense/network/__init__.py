"""Sensing layer and reconstruction network."""
from .models import NetworkConfig
from .layers import BatchNormLayer, DenseLayer, ScalingLayer
from .net import (
    ForwardCache,
    HiddenBlock,
    ReconstructionNet,
    forward_infer,
    forward_train,
    reconstruct_from_measurements,
    scale,
    sense,
)

__all__ = [
    "NetworkConfig",
    "BatchNormLayer",
    "DenseLayer",
    "ScalingLayer",
    "ForwardCache",
    "HiddenBlock",
    "ReconstructionNet",
    "forward_infer",
    "forward_train",
    "reconstruct_from_measurements",
    "scale",
    "sense",
]
