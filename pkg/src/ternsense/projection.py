"""
Sparsify, binarize and scale the sensing weights.

Maps the continuous weights theta (n x m) to the deployed ternary matrix
and its per-column scaling factors:

    mask     <- column-wise top-k of |theta|
    theta_s  <- mask * theta
    theta_sb <- sign(theta_s) on the mask
    alpha_j  <- ||theta_s[:, j]||_1 / k
"""
import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .numerics import DenseMatrix, DimensionError, SparseTernaryMatrix, as_dense, densify

logger = logging.getLogger(__name__)


def top_k_select(theta: DenseMatrix, k: int) -> np.ndarray:
    """
    Pick the k largest-magnitude rows of every column.

    Ties go to the lowest row index.

    Args:
        theta: n x m weights
        k: Entries kept per column, 1 <= k <= n

    Returns:
        (m, k) int64 array of row indices, ascending within each column
    """
    theta = np.asarray(theta, dtype=np.float64)
    n = theta.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k={k} outside [1, n={n}]")

    # stable sort on -|theta| keeps lower rows first among equal magnitudes
    order = np.argsort(-np.abs(theta), axis=0, kind="stable")[:k]
    return np.sort(order.T, axis=1)


def mask_to_dense(mask: np.ndarray, n: int) -> np.ndarray:
    """Boolean n x m view of a per-column index mask."""
    m = mask.shape[0]
    dense = np.zeros((n, m), dtype=bool)
    dense[mask, np.arange(m)[:, np.newaxis]] = True
    return dense


def apply_mask(theta: DenseMatrix, mask: np.ndarray) -> DenseMatrix:
    """Hadamard product with the mask: off-mask entries become exactly zero."""
    theta = np.asarray(theta, dtype=np.float64)
    if mask.shape[0] != theta.shape[1]:
        raise DimensionError("apply_mask", f"mask for {theta.shape[1]} columns", f"{mask.shape[0]} columns")
    return np.where(mask_to_dense(mask, theta.shape[0]), theta, 0.0)


def binarize(theta_s: DenseMatrix, mask: np.ndarray) -> SparseTernaryMatrix:
    """
    Signs of theta_s restricted to the mask.

    A masked entry equal to zero maps to +1 so every column keeps exactly k
    nonzeros.
    """
    theta_s = np.asarray(theta_s, dtype=np.float64)
    n, m = theta_s.shape
    values = np.take_along_axis(theta_s.T, mask, axis=1)
    signs = np.where(values >= 0.0, 1, -1)
    return SparseTernaryMatrix(n=n, m=m, k=mask.shape[1], indices=mask, signs=signs)


def compute_alpha(theta_s_col, k: int) -> float:
    """alpha_j = ||theta_s[:, j]||_1 / k (zero for an all-zero column)."""
    if k <= 0:
        raise ValueError("k must be positive")
    return float(np.sum(np.abs(np.asarray(theta_s_col, dtype=np.float64)))) / k


def approximation_error(theta_col, theta_sb_col, alpha_j: float) -> float:
    """Squared error ||theta_j - alpha_j * theta_sb_j||^2."""
    theta_col = np.asarray(theta_col, dtype=np.float64)
    theta_sb_col = np.asarray(theta_sb_col, dtype=np.float64)
    if theta_col.shape != theta_sb_col.shape:
        raise DimensionError("approximation_error", theta_col.shape, theta_sb_col.shape)
    residual = theta_col - alpha_j * theta_sb_col
    return float(np.dot(residual, residual))


@dataclass
class SensingWeights:
    """
    Continuous sensing weights with their derived ternary projection.

    mask, theta_sb and alpha are caches owned by refresh(); they describe
    theta as it was at the last refresh.
    """
    theta: DenseMatrix
    k: int
    mask: Optional[np.ndarray] = field(default=None, repr=False)
    theta_sb: Optional[SparseTernaryMatrix] = field(default=None, repr=False)
    alpha: Optional[np.ndarray] = field(default=None, repr=False)

    @classmethod
    def create(cls, theta: DenseMatrix, k: int) -> "SensingWeights":
        weights = cls(theta=as_dense(theta, "theta"), k=k)
        weights.refresh()
        return weights

    @property
    def n(self) -> int:
        return self.theta.shape[0]

    @property
    def m(self) -> int:
        return self.theta.shape[1]

    def refresh(self) -> "SensingWeights":
        """Recompute mask, theta_sb and alpha from the current theta."""
        if not np.all(np.isfinite(self.theta)):
            raise ValueError("theta contains non-finite entries")

        mask = top_k_select(self.theta, self.k)
        theta_s = apply_mask(self.theta, mask)
        self.mask = mask
        self.theta_sb = binarize(theta_s, mask)
        self.alpha = np.array([compute_alpha(theta_s[:, j], self.k) for j in range(self.m)])
        return self

    def scaled_projection(self) -> DenseMatrix:
        """Dense alpha * theta_sb, the approximation of theta seen by the network."""
        return densify(self.theta_sb) * self.alpha[np.newaxis, :]


def refresh(weights: SensingWeights) -> SensingWeights:
    """Module-level alias for SensingWeights.refresh."""
    return weights.refresh()
