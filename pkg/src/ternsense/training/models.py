"""
Training configuration and mutable training state.
"""
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ternsense.imaging.models import NormalizationStats
from ternsense.network import NetworkConfig, ReconstructionNet
from ternsense.numerics import SeededRng
from ternsense.projection import SensingWeights

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPSILON = 1e-8


class TrainConfig(BaseModel):
    """Optimization schedule; defaults follow the flagship setting."""
    model_config = ConfigDict(extra='forbid', frozen=True)

    epochs: int = Field(50, ge=0)
    batch_size: int = Field(5000, ge=2, description="Batch norm needs at least two samples")
    base_lr: float = Field(0.01, gt=0.0)
    lr_decay_factor: float = Field(0.6, gt=0.0, le=1.0)
    lr_decay_every: int = Field(5, ge=1, description="Epochs between decays")
    weight_decay: float = Field(0.001, ge=0.0, description="l2 weight on reconstruction dense weights")
    seed: int = 0


@dataclass
class AdamState:
    """Moment estimates for one trainable tensor."""
    first_moment: np.ndarray
    second_moment: np.ndarray
    beta1: float = ADAM_BETA1
    beta2: float = ADAM_BETA2
    epsilon: float = ADAM_EPSILON
    step: int = 0

    @classmethod
    def zeros_like(cls, param: np.ndarray) -> "AdamState":
        return cls(first_moment=np.zeros_like(param), second_moment=np.zeros_like(param))


@dataclass
class StepRecord:
    """One line of the loss log."""
    epoch: int
    step: int
    loss: float
    lr: float

    def to_line(self) -> str:
        return f"{self.epoch},{self.step},{self.loss!r},{self.lr!r}"


@dataclass
class TrainingHistory:
    """Per-step records and per-epoch mean loss."""
    steps: List[StepRecord] = field(default_factory=list)
    epoch_losses: List[float] = field(default_factory=list)


@dataclass
class TrainState:
    """
    Everything a training run mutates.

    alpha and theta_sb are derived by refresh and never enter Adam state.
    """
    config: NetworkConfig
    sensing: SensingWeights
    net: ReconstructionNet
    rng: SeededRng
    stats: NormalizationStats
    adam: Dict[str, AdamState] = field(default_factory=dict)
    epoch: int = 0
    step: int = 0
    lr: Optional[float] = None

    @classmethod
    def initialize(
        cls,
        config: NetworkConfig,
        seed: int,
        stats: Optional[NormalizationStats] = None,
    ) -> "TrainState":
        """
        Fresh state: theta ~ U(-1/sqrt(n), 1/sqrt(n)), then the network layers,
        drawn in that order from one seeded stream.
        """
        rng = SeededRng(seed)
        bound = 1.0 / np.sqrt(config.n)
        sensing = SensingWeights.create(rng.uniform(-bound, bound, size=(config.n, config.m)), config.k)
        net = ReconstructionNet.initialize(config, rng)
        net.scaling.alpha = sensing.alpha.copy()

        return cls(
            config=config,
            sensing=sensing,
            net=net,
            rng=rng,
            stats=stats or NormalizationStats(mean=0.0, std=1.0),
        )
