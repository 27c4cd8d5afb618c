"""
Pipeline operations behind the CLI subcommands.

Each cmd_* function takes resolved configuration and paths, writes its
artifact and returns what it wrote. Argument parsing and exit codes live
in main.py.
"""
import csv
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np

from ternsense.baseline import BP_METHOD_LABEL, BpConfig, DctBasis, bp_reconstruct_batch, dct_basis, random_ternary_projection
from ternsense.imaging import (
    GrayImage,
    NormalizationStats,
    PatchSet,
    compute_stats,
    denormalize,
    extract_patches,
    format_psnr,
    grid_origins,
    load_image,
    load_image_dir,
    normalize,
    overlap_average,
    psnr,
    sample_random_patches,
    save_pgm,
)
from ternsense.network import NetworkConfig, forward_infer, reconstruct_from_measurements
from ternsense.numerics import DenseMatrix, DimensionError, SeededRng, SparseTernaryMatrix, ternary_matmat
from ternsense.persistence import (
    MeasurementFile,
    load_checkpoint,
    load_measurements,
    load_stp,
    save_checkpoint,
    save_measurements,
    save_stp,
)
from ternsense.training import TrainConfig, TrainState, train

logger = logging.getLogger(__name__)

PROPOSED_METHOD_LABEL = "proposed"
IDENTITY_METHOD_LABEL = "identity"
MEAN_ROW_LABEL = "mean"
REPORT_HEADER = ("image", "method", "psnr_db")
LOSS_LOG_HEADER = "epoch,step,loss,lr"


def default_loss_log(out) -> Path:
    """<out>.loss.csv next to the checkpoint."""
    out = Path(out)
    return out.with_name(out.name + ".loss.csv")


def cmd_train(
    images_dir,
    network: NetworkConfig,
    training: TrainConfig,
    patches: int,
    out,
    loss_log=None,
) -> TrainState:
    """
    Sample patches, train sensing and reconstruction jointly, write a checkpoint.

    Patch sampling and training draw from one stream seeded by training.seed,
    so a run is fully determined by its flags and images.

    Args:
        images_dir: Directory of training images
        network: Patch side, sensing rate, sparsity ratio and layer sizes
        training: Schedule, regularization and seed
        patches: Number of random patches to sample
        out: Checkpoint path
        loss_log: Per-step loss CSV; defaults to <out>.loss.csv

    Returns:
        The trained state, as written
    """
    logger.info(f"Network: {network.describe()}")
    images = [image for _, image in load_image_dir(images_dir)]

    state = TrainState.initialize(network, seed=training.seed)
    corpus = sample_random_patches(images, network.patch_side, patches, state.rng)
    state.stats = compute_stats(corpus.vectors)
    logger.info(f"Sampled {len(corpus)} patches: mean={state.stats.mean:.4f} std={state.stats.std:.4f}")
    dataset = normalize(corpus.vectors, state.stats)

    loss_log = Path(loss_log) if loss_log else default_loss_log(out)
    with open(loss_log, "w") as log_file:
        log_file.write(LOSS_LOG_HEADER + "\n")
        history = train(state, dataset, training, on_step=lambda record: log_file.write(record.to_line() + "\n"))
    logger.info(f"Wrote {len(history.steps)} loss records to {loss_log}")

    save_checkpoint(state, out)
    return state


def cmd_export_matrix(model, out) -> SparseTernaryMatrix:
    """Write the refresh-derived ternary projection; alpha stays in the checkpoint."""
    state = load_checkpoint(model)
    matrix = state.sensing.theta_sb
    save_stp(matrix, out)
    return matrix


def _check_matrix(matrix: SparseTernaryMatrix, config: NetworkConfig):
    if (matrix.n, matrix.m) != (config.n, config.m):
        raise DimensionError("sense", f"a {config.n}x{config.m} matrix", f"{matrix.n}x{matrix.m}")


def cmd_sense(matrix_path, model, image_path, stride: int, out) -> MeasurementFile:
    """
    Measure every stride-grid patch of one image with the exported matrix.

    The model contributes only the normalization statistics and the
    dimensions to check against.
    """
    matrix = load_stp(matrix_path)
    state = load_checkpoint(model)
    _check_matrix(matrix, state.config)

    image = load_image(image_path)
    patches = extract_patches(image, state.config.patch_side, stride)
    measurements = MeasurementFile(
        width=image.width,
        height=image.height,
        patch_side=state.config.patch_side,
        stride=stride,
        vectors=ternary_matmat(matrix, normalize(patches.vectors, state.stats)),
    )
    save_measurements(measurements, out)
    return measurements


def cmd_reconstruct(model, measurements_path, out) -> GrayImage:
    """Scale, infer, denormalize and overlap-average a measurement file into an image."""
    state = load_checkpoint(model)
    measurements = load_measurements(measurements_path)
    config = state.config

    if (measurements.patch_side, measurements.m) != (config.patch_side, config.m):
        raise DimensionError(
            "reconstruct",
            f"patch side {config.patch_side} and m={config.m}",
            f"patch side {measurements.patch_side} and m={measurements.m}",
        )
    origins = grid_origins(measurements.width, measurements.height, config.patch_side, measurements.stride)
    if len(origins) != measurements.count:
        raise DimensionError("reconstruct", f"{len(origins)} measurement vectors", measurements.count)

    vectors = denormalize(reconstruct_from_measurements(state.net, measurements.vectors), state.stats)
    image = overlap_average(PatchSet(config.patch_side, origins, vectors), measurements.width, measurements.height)
    save_pgm(image, out)
    return image


def reconstruct_image(state: TrainState, image: GrayImage, stride: int, identity: bool = False) -> GrayImage:
    """
    Sense and reconstruct every stride-grid patch of an image, then reassemble.

    With identity the patches bypass sensing and the network.
    """
    patches = extract_patches(image, state.config.patch_side, stride)
    if identity:
        vectors = patches.vectors
    else:
        normalized = normalize(patches.vectors, state.stats)
        vectors = denormalize(forward_infer(state.net, state.sensing.theta_sb, normalized), state.stats)
    return overlap_average(patches.with_vectors(vectors), image.width, image.height)


def bp_reconstruct_image(
    image: GrayImage,
    phi: DenseMatrix,
    basis: DctBasis,
    stride: int,
    stats: NormalizationStats,
    config: BpConfig,
) -> GrayImage:
    """Baseline counterpart of reconstruct_image: y = Phi x per patch, l1 recovery in the DCT basis."""
    patches = extract_patches(image, basis.side, stride)
    normalized = normalize(patches.vectors, stats)
    recovered = bp_reconstruct_batch(phi, basis, normalized @ phi.T, config)
    return overlap_average(patches.with_vectors(denormalize(recovered, stats)), image.width, image.height)


@dataclass
class EvaluationReport:
    """Per-image PSNR by method, in evaluation order."""
    methods: List[str]
    rows: List[Tuple[str, str, float]] = field(default_factory=list)

    def means(self) -> Dict[str, float]:
        return {
            method: float(np.mean([value for _, row_method, value in self.rows if row_method == method]))
            for method in self.methods
        }

    def write_csv(self, path):
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(REPORT_HEADER)
            for image_name, method, value in self.rows:
                writer.writerow((image_name, method, format_psnr(value)))
            for method, value in self.means().items():
                writer.writerow((MEAN_ROW_LABEL, method, format_psnr(value)))


def cmd_evaluate(
    model,
    images_dir,
    stride: int,
    baseline: str,
    report,
    identity: bool = False,
    bp_config: Optional[BpConfig] = None,
    bp_seed: int = 0,
) -> EvaluationReport:
    """
    PSNR of every image of a directory, for the trained pipeline and optionally the baseline.

    Args:
        model: Checkpoint path
        images_dir: Directory of reference images
        stride: Patch stride used for both methods
        baseline: "none" or "bp"
        report: CSV output path
        identity: Replace the trained pipeline with the identity path
        bp_config: ISTA settings for the baseline
        bp_seed: Seed of the baseline's random ternary Phi

    Returns:
        EvaluationReport as written to report
    """
    state = load_checkpoint(model)
    config = state.config
    methods = [IDENTITY_METHOD_LABEL if identity else PROPOSED_METHOD_LABEL]

    phi = basis = None
    if baseline == "bp":
        methods.append(BP_METHOD_LABEL)
        bp_config = bp_config or BpConfig()
        phi = random_ternary_projection(config.n, config.m, SeededRng(bp_seed))
        basis = dct_basis(config.patch_side)

    evaluation = EvaluationReport(methods=methods)
    for image_name, image in load_image_dir(images_dir):
        started = time.perf_counter()
        reconstructed = reconstruct_image(state, image, stride, identity=identity)
        evaluation.rows.append((image_name, methods[0], psnr(image, reconstructed)))

        if phi is not None:
            recovered = bp_reconstruct_image(image, phi, basis, stride, state.stats, bp_config)
            evaluation.rows.append((image_name, BP_METHOD_LABEL, psnr(image, recovered)))
        logger.debug(f"Evaluated {image_name} in {time.perf_counter() - started:.2f}s")

    evaluation.write_csv(report)
    for method, value in evaluation.means().items():
        logger.info(f"Mean PSNR {method}: {format_psnr(value)} dB")
    logger.info(f"Wrote report for {len(evaluation.rows) // len(methods)} images to {report}")
    return evaluation
