"""
Random ternary sensing with l1 recovery in an orthonormal 2-D DCT basis.

Recovery solves the Lagrangian relaxation of basis pursuit with iterative
soft thresholding (ISTA):

    u <- soft(u - tau A^T (A u - y), tau lam),   tau = 1 / ||A||_2^2
"""
import logging
from dataclasses import dataclass

import numpy as np
from scipy.fft import dct

from ternsense.numerics import DenseMatrix, DimensionError, SeededRng
from .models import BpConfig, IstaResult

logger = logging.getLogger(__name__)

POWER_ITERATIONS = 500
POWER_SEED = 0
# keeps the step below 1/||A||^2 when power iteration undershoots
STEP_SAFETY = 1.01


class ZeroOperatorError(ValueError):
    """ISTA was handed an all-zero operator."""


@dataclass(frozen=True)
class DctBasis:
    """Orthonormal separable 2-D DCT-II synthesis matrix for raster-scanned S x S patches."""
    side: int
    matrix: np.ndarray

    def analyze(self, x) -> np.ndarray:
        return self.matrix.T @ np.asarray(x, dtype=np.float64)

    def synthesize(self, u) -> np.ndarray:
        return self.matrix @ np.asarray(u, dtype=np.float64)


def dct_basis(side: int) -> DctBasis:
    """Psi = kron(C^T, C^T) with C the orthonormal 1-D DCT-II matrix; column 0 is constant."""
    if side < 1:
        raise ValueError(f"side must be >= 1, got {side}")
    synthesis_1d = dct(np.eye(side), norm="ortho", axis=0).T
    return DctBasis(side=side, matrix=np.kron(synthesis_1d, synthesis_1d))


def random_ternary_projection(n: int, m: int, rng: SeededRng) -> DenseMatrix:
    """m x n matrix with i.i.d. entries drawn equiprobably from {-1, 0, +1}."""
    if not 1 <= m < n:
        raise ValueError(f"need 1 <= m < n, got m={m}, n={n}")
    return rng.integers(-1, 2, size=(m, n)).astype(np.float64)


def spectral_norm_squared(A: DenseMatrix) -> float:
    """||A||_2^2 by power iteration on A^T A from a fixed-seed start."""
    v = SeededRng(POWER_SEED).standard_normal(A.shape[1])
    v /= np.linalg.norm(v)
    estimate = 0.0
    for _ in range(POWER_ITERATIONS):
        w = A.T @ (A @ v)
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return 0.0
        previous, estimate = estimate, float(norm)
        v = w / norm
        if abs(estimate - previous) <= 1e-12 * estimate:
            break
    return estimate


def soft_threshold(v: np.ndarray, threshold) -> np.ndarray:
    return np.sign(v) * np.maximum(np.abs(v) - threshold, 0.0)


def _objective(residual: np.ndarray, U: np.ndarray, lam: np.ndarray) -> np.ndarray:
    return 0.5 * np.sum(residual * residual, axis=0) + lam * np.sum(np.abs(U), axis=0)


def ista_solve_batch(A: DenseMatrix, Y, config: BpConfig, track_objective: bool = False):
    """
    Solve one l1 problem per column of Y (shape (m, P)).

    Columns stop independently once their relative objective change drops
    to config.tol.

    Returns:
        (U of shape (n, P), per-column lam, iterations run, converged flags,
        objective trace of shape (iterations + 1, P) or None)

    Raises:
        ZeroOperatorError: A is all zeros
    """
    A = np.asarray(A, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    if Y.ndim != 2 or Y.shape[0] != A.shape[0]:
        raise DimensionError("ista_solve", f"measurements with {A.shape[0]} rows", f"shape {Y.shape}")

    lipschitz = spectral_norm_squared(A)
    if lipschitz == 0.0:
        raise ZeroOperatorError("ista_solve needs a nonzero operator")
    tau = 1.0 / (STEP_SAFETY * lipschitz)

    if config.lam is not None:
        lam = np.full(Y.shape[1], config.lam)
    else:
        lam = config.lam_ratio * np.max(np.abs(A.T @ Y), axis=0)

    U = np.zeros((A.shape[1], Y.shape[1]))
    AU = np.zeros_like(Y)
    objective = _objective(-Y, U, lam)
    trace = [objective.copy()] if track_objective else None
    active = np.ones(Y.shape[1], dtype=bool)
    iterations = 0

    while iterations < config.max_iters and active.any():
        iterations += 1
        cols = np.flatnonzero(active)
        gradient = A.T @ (AU[:, cols] - Y[:, cols])
        U_next = soft_threshold(U[:, cols] - tau * gradient, tau * lam[cols])
        AU_next = A @ U_next
        objective_next = _objective(AU_next - Y[:, cols], U_next, lam[cols])

        change = np.abs(objective[cols] - objective_next) / np.maximum(objective[cols], np.finfo(float).tiny)
        U[:, cols] = U_next
        AU[:, cols] = AU_next
        objective[cols] = objective_next
        active[cols[change <= config.tol]] = False
        if trace is not None:
            trace.append(objective.copy())

    converged = ~active
    if not converged.all():
        logger.warning(f"ISTA hit max_iters={config.max_iters} on {int(active.sum())} of {Y.shape[1]} problems")
    logger.debug(f"ISTA finished {Y.shape[1]} problems in {iterations} iterations")

    return U, lam, iterations, converged, (np.array(trace) if trace is not None else None)


def ista_solve(A: DenseMatrix, y, config: BpConfig) -> IstaResult:
    """Single-vector ISTA with its objective trace."""
    y = np.asarray(y, dtype=np.float64)
    if y.ndim != 1:
        raise DimensionError("ista_solve", "a measurement vector", f"shape {y.shape}")
    U, lam, iterations, converged, trace = ista_solve_batch(A, y[:, np.newaxis], config, track_objective=True)
    return IstaResult(
        u=U[:, 0],
        objective=trace[:, 0],
        iterations=iterations,
        converged=bool(converged[0]),
        lam=float(lam[0]),
    )


def bp_reconstruct(phi: DenseMatrix, basis: DctBasis, y, config: BpConfig) -> np.ndarray:
    """x_hat = Psi u with u recovered from y = Phi Psi u."""
    phi = np.asarray(phi, dtype=np.float64)
    if phi.shape[1] != basis.matrix.shape[0]:
        raise DimensionError("bp_reconstruct", f"Phi with {basis.matrix.shape[0]} columns", phi.shape)
    result = ista_solve(phi @ basis.matrix, y, config)
    return basis.synthesize(result.u)


def bp_reconstruct_batch(phi: DenseMatrix, basis: DctBasis, measurements, config: BpConfig) -> np.ndarray:
    """bp_reconstruct for every row of a (P, m) measurement array, returning (P, n)."""
    phi = np.asarray(phi, dtype=np.float64)
    if phi.shape[1] != basis.matrix.shape[0]:
        raise DimensionError("bp_reconstruct", f"Phi with {basis.matrix.shape[0]} columns", phi.shape)
    U, *_ = ista_solve_batch(phi @ basis.matrix, np.asarray(measurements, dtype=np.float64).T, config)
    return (basis.matrix @ U).T
