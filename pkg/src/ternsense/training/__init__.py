"""Joint training of the sensing weights and the reconstruction network."""
from .models import AdamState, StepRecord, TrainConfig, TrainingHistory, TrainState
from .optim import adam_update, lr_at, straight_through_update
from .trainer import (
    StaleCacheError,
    StepResult,
    backward,
    l2_penalty,
    mse_loss,
    refresh_sensing,
    train,
    train_step,
)

__all__ = [
    "AdamState",
    "StepRecord",
    "TrainConfig",
    "TrainingHistory",
    "TrainState",
    "adam_update",
    "lr_at",
    "straight_through_update",
    "StaleCacheError",
    "StepResult",
    "backward",
    "l2_penalty",
    "mse_loss",
    "refresh_sensing",
    "train",
    "train_step",
]
