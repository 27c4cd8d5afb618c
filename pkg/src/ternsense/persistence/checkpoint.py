"""
Model checkpoint format.

Layout, little-endian, fields in this fixed order:
    "TCSM" | version u32
    patch_side u32 | sensing_rate f64 | sparsity_ratio f64 | hidden_layers u32 | hidden_units u32
    stats mean f64 | stats std f64
    epoch u64 | step u64 | seed u64
    tensor count u32, then per tensor:
        name length u32 | utf-8 name | ndim u32 | dims u32 * ndim | float64 values (row-major)

theta_sb and the mask are not stored; loading refreshes them from theta.
Only the seed of the random stream is stored, not its position: a loaded
state draws from the start of the seeded stream again, so checkpoints are
not resumable mid-stream.
"""
import logging
import struct
from pathlib import Path
from typing import Dict, List, Tuple

import numpy as np
from pydantic import ValidationError

from ternsense.imaging.models import NormalizationStats
from ternsense.network import NetworkConfig, ReconstructionNet
from ternsense.network.layers import BatchNormLayer, DenseLayer, ScalingLayer
from ternsense.network.net import HiddenBlock
from ternsense.numerics import SeededRng
from ternsense.projection import SensingWeights
from ternsense.training.models import TrainState
from .errors import ByteReader, FormatError

logger = logging.getLogger(__name__)

CHECKPOINT_MAGIC = b"TCSM"
CHECKPOINT_VERSION = 1
CONFIG_FORMAT = "<IddII"
STATS_FORMAT = "<dd"
COUNTERS_FORMAT = "<QQQ"

BN_TENSORS = ("gamma", "beta", "running_mean", "running_var")


def expected_shapes(config: NetworkConfig) -> List[Tuple[str, Tuple[int, ...]]]:
    """Canonical tensor names and shapes, in file order."""
    shapes = [("theta", (config.n, config.m)), ("alpha", (config.m,))]
    fan_in = config.m
    for i in range(config.hidden_layers):
        shapes.append((f"hidden.{i}.weights", (fan_in, config.hidden_units)))
        shapes.append((f"hidden.{i}.bias", (config.hidden_units,)))
        shapes.extend((f"hidden.{i}.{name}", (config.hidden_units,)) for name in BN_TENSORS)
        fan_in = config.hidden_units
    shapes.append(("output.weights", (fan_in, config.n)))
    shapes.append(("output.bias", (config.n,)))
    return shapes


def checkpoint_tensors(state: TrainState) -> Dict[str, np.ndarray]:
    """Stored tensors of a state, keyed by canonical name."""
    net = state.net
    tensors = {"theta": state.sensing.theta, "alpha": net.scaling.alpha}
    for i, block in enumerate(net.hidden):
        tensors[f"hidden.{i}.weights"] = block.dense.weights
        tensors[f"hidden.{i}.bias"] = block.dense.bias
        for name in BN_TENSORS:
            tensors[f"hidden.{i}.{name}"] = getattr(block.norm, name)
    tensors["output.weights"] = net.output.weights
    tensors["output.bias"] = net.output.bias
    return tensors


def encode_checkpoint_parts(
    config: NetworkConfig,
    stats: NormalizationStats,
    counters: Tuple[int, int, int],
    tensors: Dict[str, np.ndarray],
) -> bytes:
    """Serialize the given pieces; tensors are written in canonical order, unknown names last."""
    chunks = [
        struct.pack("<4sI", CHECKPOINT_MAGIC, CHECKPOINT_VERSION),
        struct.pack(
            CONFIG_FORMAT,
            config.patch_side, config.sensing_rate, config.sparsity_ratio,
            config.hidden_layers, config.hidden_units,
        ),
        struct.pack(STATS_FORMAT, stats.mean, stats.std),
        struct.pack(COUNTERS_FORMAT, *counters),
        struct.pack("<I", len(tensors)),
    ]

    canonical = [name for name, _ in expected_shapes(config)]
    ordered = [name for name in canonical if name in tensors]
    ordered += sorted(name for name in tensors if name not in canonical)
    for name in ordered:
        array = np.asarray(tensors[name], dtype=np.float64)
        encoded_name = name.encode("utf-8")
        chunks.append(struct.pack("<I", len(encoded_name)) + encoded_name)
        chunks.append(struct.pack(f"<I{array.ndim}I", array.ndim, *array.shape))
        chunks.append(array.astype("<f8").tobytes(order="C"))

    return b"".join(chunks)


def encode_checkpoint(state: TrainState) -> bytes:
    return encode_checkpoint_parts(
        state.config,
        state.stats,
        (state.epoch, state.step, state.rng.seed),
        checkpoint_tensors(state),
    )


def _read_tensors(reader: ByteReader) -> Dict[str, np.ndarray]:
    (count,) = reader.unpack("<I")
    tensors: Dict[str, np.ndarray] = {}
    for _ in range(count):
        (name_length,) = reader.unpack("<I")
        try:
            name = reader.take(name_length).decode("utf-8")
        except UnicodeDecodeError as error:
            raise FormatError(reader.source, "tensor name is not utf-8") from error
        (ndim,) = reader.unpack("<I")
        dims = reader.unpack(f"<{ndim}I")
        size = int(np.prod(dims, dtype=np.int64))
        values = np.frombuffer(reader.take(size * 8), dtype="<f8").astype(np.float64).reshape(dims)
        if name in tensors:
            raise FormatError(reader.source, f"duplicate tensor '{name}'")
        tensors[name] = values
    return tensors


def decode_checkpoint(data: bytes, source: str = "<bytes>") -> TrainState:
    """
    Rebuild a TrainState; theta_sb, mask and Adam moments are not restored.

    Raises:
        FormatError: bad magic, truncated file, unsupported version, missing,
            unexpected or mis-shaped tensors, invalid configuration
    """
    reader = ByteReader(data, source)
    reader.expect_magic(CHECKPOINT_MAGIC)
    (version,) = reader.unpack("<I")
    if version != CHECKPOINT_VERSION:
        raise FormatError(source, f"unsupported version {version}")

    patch_side, rate, gamma, layers, units = reader.unpack(CONFIG_FORMAT)
    mean, std = reader.unpack(STATS_FORMAT)
    epoch, step, seed = reader.unpack(COUNTERS_FORMAT)
    try:
        config = NetworkConfig(
            patch_side=patch_side, sensing_rate=rate, sparsity_ratio=gamma,
            hidden_layers=layers, hidden_units=units,
        )
        stats = NormalizationStats(mean=mean, std=std)
    except ValidationError as error:
        raise FormatError(source, f"invalid configuration: {error.errors()[0]['msg']}") from error

    tensors = _read_tensors(reader)
    if reader.remaining():
        raise FormatError(source, "trailing data")

    shapes = expected_shapes(config)
    for name, shape in shapes:
        if name not in tensors:
            raise FormatError(source, f"missing tensor '{name}'")
        if tensors[name].shape != shape:
            raise FormatError(source, f"dimension inconsistency for tensor '{name}'")
    known = {name for name, _ in shapes}
    for name in tensors:
        if name not in known:
            raise FormatError(source, f"unexpected tensor '{name}'")

    hidden = [
        HiddenBlock(
            dense=DenseLayer(weights=tensors[f"hidden.{i}.weights"], bias=tensors[f"hidden.{i}.bias"]),
            norm=BatchNormLayer(**{name: tensors[f"hidden.{i}.{name}"] for name in BN_TENSORS}),
        )
        for i in range(config.hidden_layers)
    ]
    net = ReconstructionNet(
        scaling=ScalingLayer(alpha=tensors["alpha"]),
        hidden=hidden,
        output=DenseLayer(weights=tensors["output.weights"], bias=tensors["output.bias"]),
    )

    return TrainState(
        config=config,
        sensing=SensingWeights.create(tensors["theta"], config.k),
        net=net,
        rng=SeededRng(seed),
        stats=stats,
        epoch=epoch,
        step=step,
    )


def save_checkpoint(state: TrainState, path):
    path = Path(path)
    path.write_bytes(encode_checkpoint(state))
    logger.info(f"Wrote checkpoint ({state.config.describe()}) to {path}")


def load_checkpoint(path) -> TrainState:
    path = Path(path)
    state = decode_checkpoint(path.read_bytes(), source=str(path))
    logger.info(f"Loaded checkpoint {path}: {state.config.describe()}")
    return state
