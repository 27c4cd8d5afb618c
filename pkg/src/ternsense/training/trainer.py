"""
Training loop.

Each step refreshes the ternary projection from theta, runs the network
on the ternary weights, backpropagates, and updates the reconstruction
parameters with Adam and theta with the gradient taken at theta_sb.
"""
import logging
from dataclasses import dataclass
from typing import Callable, Dict, Optional

import numpy as np

from ternsense.network import ForwardCache, forward_train
from ternsense.network.layers import DenseLayer
from ternsense.numerics import DimensionError
from .models import AdamState, StepRecord, TrainConfig, TrainingHistory, TrainState
from .optim import adam_update, lr_at, straight_through_update

logger = logging.getLogger(__name__)

THETA_SB = "theta_sb"


class StaleCacheError(RuntimeError):
    """Backward was handed a cache from other parameters or another batch."""
    def __init__(self, cache_version: int, net_version: int, reason: str):
        self.cache_version = cache_version
        self.net_version = net_version
        super().__init__(f"stale forward cache (cache v{cache_version}, net v{net_version}): {reason}")


@dataclass
class StepResult:
    loss: float
    data_loss: float
    penalty: float
    lr: float


def mse_loss(x_batch, xhat_batch) -> float:
    """Squared error summed per sample and averaged over the B samples."""
    x_batch = np.asarray(x_batch, dtype=np.float64)
    xhat_batch = np.asarray(xhat_batch, dtype=np.float64)
    if x_batch.shape != xhat_batch.shape:
        raise DimensionError("mse_loss", x_batch.shape, xhat_batch.shape)
    residual = x_batch - xhat_batch
    return float(np.sum(residual * residual) / x_batch.shape[0])


def l2_penalty(state: TrainState, weight_decay: float) -> float:
    """lambda * sum ||W||^2 over the reconstruction dense weights."""
    if not weight_decay:
        return 0.0
    return weight_decay * float(sum(np.sum(w * w) for w in state.net.dense_weights()))


def backward(state: TrainState, cache: ForwardCache, x_batch) -> Dict[str, np.ndarray]:
    """
    Reverse-mode gradients of mse_loss for the batch behind cache.

    theta_sb is treated as a continuous tensor; alpha is a constant.

    Returns:
        Mapping of parameter name (see ReconstructionNet.parameters) plus
        "theta_sb" to its gradient
    """
    net = state.net
    x_batch = np.asarray(x_batch, dtype=np.float64)
    if cache.version != net.version:
        raise StaleCacheError(cache.version, net.version, "parameters changed since forward")
    if x_batch.shape != cache.x.shape or not np.array_equal(x_batch, cache.x):
        raise StaleCacheError(cache.version, net.version, "batch differs from the forward batch")

    batch = x_batch.shape[0]
    grads: Dict[str, np.ndarray] = {}

    grad = 2.0 * (cache.reconstruction - x_batch) / batch
    grad, layer_grads = net.output.backward(grad, cache.output_input)
    grads["output.weights"] = layer_grads["weights"]
    grads["output.bias"] = layer_grads["bias"]

    for i in reversed(range(len(net.hidden))):
        block = net.hidden[i]
        grad = grad * (cache.pre_activations[i] > 0.0)
        grad, norm_grads = block.norm.backward(grad, cache.norm_caches[i])
        grad, dense_grads = block.dense.backward(grad, cache.block_inputs[i])
        grads[f"hidden.{i}.weights"] = dense_grads["weights"]
        grads[f"hidden.{i}.bias"] = dense_grads["bias"]
        grads[f"hidden.{i}.gamma"] = norm_grads["gamma"]
        grads[f"hidden.{i}.beta"] = norm_grads["beta"]

    grad_measurements = net.scaling.forward(grad)
    grads[THETA_SB] = x_batch.T @ grad_measurements
    return grads


def _adam_state(state: TrainState, name: str, param: np.ndarray) -> AdamState:
    if name not in state.adam:
        state.adam[name] = AdamState.zeros_like(param)
    return state.adam[name]


def apply_gradients(state: TrainState, grads: Dict[str, np.ndarray], lr: float, weight_decay: float):
    """Adam on the reconstruction parameters, straight-through Adam on theta."""
    for name, owner, attribute in state.net.parameters():
        decay = weight_decay if isinstance(owner, DenseLayer) and attribute == "weights" else 0.0
        param = getattr(owner, attribute)
        setattr(owner, attribute, adam_update(param, grads[name], _adam_state(state, name, param), lr, decay))

    straight_through_update(state.sensing, grads[THETA_SB], _adam_state(state, "theta", state.sensing.theta), lr)
    state.net.version += 1


def refresh_sensing(state: TrainState):
    """Sparsify and binarize theta, then hand the new alpha to the scaling layer."""
    state.sensing.refresh()
    state.net.scaling.alpha = state.sensing.alpha.copy()


def train_step(state: TrainState, batch, lr: float, weight_decay: float = 0.0) -> StepResult:
    """
    One full training step on a normalized batch.

    Returns:
        StepResult with loss = data_loss + l2 penalty, both measured before
        the update
    """
    refresh_sensing(state)
    xhat, cache = forward_train(state.net, state.sensing.theta_sb, batch)
    data_loss = mse_loss(cache.x, xhat)
    penalty = l2_penalty(state, weight_decay)

    grads = backward(state, cache, cache.x)
    apply_gradients(state, grads, lr, weight_decay)
    state.step += 1
    state.lr = lr

    return StepResult(loss=data_loss + penalty, data_loss=data_loss, penalty=penalty, lr=lr)


def iterate_batches(count: int, batch_size: int, order: np.ndarray):
    """Yield index arrays of consecutive batches; a trailing batch under two samples is dropped."""
    for start in range(0, count, batch_size):
        indices = order[start:start + batch_size]
        if len(indices) < 2:
            logger.debug(f"Dropping trailing batch of {len(indices)} sample")
            continue
        yield indices


def train(
    state: TrainState,
    dataset,
    config: TrainConfig,
    on_step: Optional[Callable[[StepRecord], None]] = None,
) -> TrainingHistory:
    """
    Epoch loop over seeded shuffles of the dataset.

    Args:
        state: Training state, updated in place
        dataset: (N, n) normalized patches
        config: Schedule and regularization
        on_step: Called with every StepRecord (the CLI writes the loss log from it)

    Returns:
        TrainingHistory of the run
    """
    dataset = np.asarray(dataset, dtype=np.float64)
    if dataset.ndim != 2 or dataset.shape[0] == 0:
        raise ValueError("training needs a non-empty (N, n) dataset")
    if dataset.shape[1] != state.config.n:
        raise DimensionError("train", f"patches of length {state.config.n}", f"length {dataset.shape[1]}")
    if dataset.shape[0] < 2:
        raise ValueError("training needs at least two patches")

    history = TrainingHistory()
    if config.epochs == 0:
        return history

    for epoch in range(state.epoch, state.epoch + config.epochs):
        lr = lr_at(epoch, config)
        order = state.rng.permutation(dataset.shape[0])
        losses = []

        for indices in iterate_batches(dataset.shape[0], config.batch_size, order):
            result = train_step(state, dataset[indices], lr, config.weight_decay)
            record = StepRecord(epoch=epoch, step=state.step, loss=result.loss, lr=lr)
            history.steps.append(record)
            losses.append(result.loss)
            logger.debug(f"epoch={epoch} step={state.step} loss={result.loss:.6f}")
            if on_step is not None:
                on_step(record)

        epoch_loss = float(np.mean(losses))
        history.epoch_losses.append(epoch_loss)
        state.epoch = epoch + 1
        logger.info(f"Epoch {epoch + 1}: loss={epoch_loss:.6f} lr={lr:g} steps={state.step}")

    # the stored alpha and exported theta_sb must derive from the final theta
    refresh_sensing(state)
    return history
