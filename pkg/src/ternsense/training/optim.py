"""Adam updates, the straight-through sensing update and the learning-rate schedule."""

import logging

import numpy as np

from ternsense.numerics import DimensionError
from ternsense.projection import SensingWeights
from .models import AdamState, TrainConfig

logger = logging.getLogger(__name__)


def adam_update(
    param: np.ndarray,
    grad: np.ndarray,
    state: AdamState,
    lr: float,
    weight_decay: float = 0.0,
) -> np.ndarray:
    """
    One bias-corrected Adam step.

    Args:
        param: Current tensor (not modified)
        grad: Data-loss gradient, same shape as param
        state: Moments for this tensor; advanced in place
        lr: Step size mu
        weight_decay: lambda; adds 2*lambda*param to the gradient first

    Returns:
        The updated tensor
    """
    if param.shape != grad.shape:
        raise DimensionError("adam_update", param.shape, grad.shape)

    if weight_decay:
        grad = grad + 2.0 * weight_decay * param

    state.step += 1
    state.first_moment = state.beta1 * state.first_moment + (1.0 - state.beta1) * grad
    state.second_moment = state.beta2 * state.second_moment + (1.0 - state.beta2) * grad * grad

    m_hat = state.first_moment / (1.0 - state.beta1 ** state.step)
    v_hat = state.second_moment / (1.0 - state.beta2 ** state.step)
    return param - lr * m_hat / (np.sqrt(v_hat) + state.epsilon)


def straight_through_update(
    sensing: SensingWeights,
    grad_theta_sb: np.ndarray,
    state: AdamState,
    lr: float,
) -> np.ndarray:
    """
    Apply the gradient taken with respect to theta_sb to the continuous theta.

    Every entry moves, on or off the current mask; no clipping and no l2.
    Caches are left alone until the next refresh.
    """
    if grad_theta_sb.shape != sensing.theta.shape:
        raise DimensionError("straight_through_update", sensing.theta.shape, grad_theta_sb.shape)
    sensing.theta = adam_update(sensing.theta, grad_theta_sb, state, lr)
    return sensing.theta


def lr_at(epoch: int, config: TrainConfig) -> float:
    """base_lr * factor ** floor(epoch / decay_every)."""
    if epoch < 0:
        raise ValueError(f"epoch must be non-negative, got {epoch}")
    return config.base_lr * config.lr_decay_factor ** (epoch // config.lr_decay_every)
