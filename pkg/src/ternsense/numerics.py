"""
Dense and sparse ternary linear algebra primitives plus seeded randomness.

Both matvec kernels accumulate in ascending index order so that a ternary
product and the dense product of its densified transpose agree bit for bit.
"""
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)

# Dense operands are plain float64 ndarrays of shape (rows, cols).
DenseMatrix = np.ndarray

RNG_ALGORITHM = "PCG64"


class DimensionError(ValueError):
    """Operand shapes do not chain."""
    def __init__(self, operation: str, expected: Any, actual: Any):
        self.operation = operation
        self.expected = expected
        self.actual = actual
        super().__init__(f"{operation}: expected {expected}, got {actual}")


class CorruptMatrixError(ValueError):
    """A sparse ternary layout violates its invariants."""


def as_dense(values, name: str = "matrix") -> DenseMatrix:
    """
    Coerce values to a finite 2-D float64 array.

    Args:
        values: Anything numpy can turn into a 2-D array
        name: Label used in error messages

    Returns:
        float64 ndarray of shape (rows, cols)
    """
    array = np.asarray(values, dtype=np.float64)
    if array.ndim != 2:
        raise DimensionError(name, "2-D array", f"{array.ndim}-D array")
    if not np.all(np.isfinite(array)):
        raise ValueError(f"{name} contains non-finite entries")
    return array


def dense_matvec(A: DenseMatrix, x) -> np.ndarray:
    """Compute y = A x, summing over columns in ascending order."""
    A = np.asarray(A, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    if A.ndim != 2 or x.ndim != 1 or x.shape[0] != A.shape[1]:
        raise DimensionError("dense_matvec", f"x of length {A.shape[-1]}", f"shape {x.shape}")

    y = np.zeros(A.shape[0], dtype=np.float64)
    for j in range(A.shape[1]):
        y += A[:, j] * x[j]
    return y


@dataclass(frozen=True, eq=False)
class SparseTernaryMatrix:
    """
    n x m matrix with exactly k entries in {-1, +1} per column.

    Stored compactly as two (m, k) arrays: ascending row indices and signs.
    Arrays are made read-only at construction.
    """
    n: int
    m: int
    k: int
    indices: np.ndarray = field(repr=False)
    signs: np.ndarray = field(repr=False)

    def __post_init__(self):
        try:
            indices = np.array(self.indices, dtype=np.int64).reshape(self.m, self.k)
            signs = np.array(self.signs, dtype=np.int8).reshape(self.m, self.k)
        except ValueError as error:
            raise CorruptMatrixError(f"layout does not match m={self.m}, k={self.k}: {error}") from error

        errors = []
        if self.k < 1 or self.k > self.n:
            errors.append(f"k={self.k} outside [1, n={self.n}]")
        if self.m < 1:
            errors.append(f"m={self.m} must be positive")
        if indices.size and (indices.min() < 0 or indices.max() >= self.n):
            errors.append(f"row index out of range [0, {self.n})")
        if self.k > 1 and np.any(np.diff(indices, axis=1) <= 0):
            errors.append("row indices within a column must be strictly increasing")
        if not np.all(np.isin(signs, (-1, 1))):
            errors.append("signs must be -1 or +1")
        if errors:
            raise CorruptMatrixError("; ".join(errors))

        indices.setflags(write=False)
        signs.setflags(write=False)
        object.__setattr__(self, "indices", indices)
        object.__setattr__(self, "signs", signs)

    @classmethod
    def from_columns(cls, n: int, columns: Sequence[Sequence[Tuple[int, int]]]) -> "SparseTernaryMatrix":
        """Build from per-column lists of (row_index, sign) pairs."""
        if not columns:
            raise CorruptMatrixError("matrix needs at least one column")
        k = len(columns[0])
        if any(len(col) != k for col in columns):
            raise CorruptMatrixError("every column must hold the same number of entries")
        indices = [[row for row, _ in col] for col in columns]
        signs = [[sign for _, sign in col] for col in columns]
        return cls(n=n, m=len(columns), k=k, indices=np.array(indices), signs=np.array(signs))

    @property
    def columns(self) -> List[List[Tuple[int, int]]]:
        """Per-column (row_index, sign) lists."""
        return [
            [(int(r), int(s)) for r, s in zip(self.indices[j], self.signs[j])]
            for j in range(self.m)
        ]

    @property
    def nnz(self) -> int:
        return self.m * self.k

    def __eq__(self, other):
        if not isinstance(other, SparseTernaryMatrix):
            return NotImplemented
        return (
            (self.n, self.m, self.k) == (other.n, other.m, other.k)
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.signs, other.signs)
        )

    def __hash__(self):
        return hash((self.n, self.m, self.k, self.indices.tobytes(), self.signs.tobytes()))


def ternary_matvec(T: SparseTernaryMatrix, x) -> np.ndarray:
    """
    Compute y = T^T x with additions and subtractions only.

    One output per column of T. Terms are accumulated in ascending row
    order, matching dense_matvec(densify(T).T, x) exactly.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] != T.n:
        raise DimensionError("ternary_matvec", f"x of length {T.n}", f"shape {x.shape}")
    return ternary_matmat(T, x[np.newaxis, :])[0]


def ternary_matmat(T: SparseTernaryMatrix, X) -> np.ndarray:
    """Row-wise ternary_matvec over a (B, n) batch, returning (B, m)."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != T.n:
        raise DimensionError("ternary_matmat", f"batch of shape (B, {T.n})", f"shape {X.shape}")
    Y = np.zeros((X.shape[0], T.m), dtype=np.float64)
    positive = T.signs > 0
    for t in range(T.k):
        gathered = X[:, T.indices[:, t]]
        Y += np.where(positive[:, t], gathered, -gathered)
    return Y


def densify(T: SparseTernaryMatrix) -> DenseMatrix:
    """Expand T to an n x m float64 matrix with entries in {-1, 0, +1}."""
    dense = np.zeros((T.n, T.m), dtype=np.float64)
    columns = np.broadcast_to(np.arange(T.m)[:, np.newaxis], T.indices.shape)
    dense[T.indices, columns] = T.signs
    return dense


def sparsify(D: DenseMatrix) -> SparseTernaryMatrix:
    """
    Inverse of densify.

    Raises:
        CorruptMatrixError: entries outside {-1, 0, +1} or unequal column counts
    """
    D = as_dense(D, "sparsify input")
    if not np.all(np.isin(D, (-1.0, 0.0, 1.0))):
        raise CorruptMatrixError("entries must lie in {-1, 0, +1}")

    counts = np.count_nonzero(D, axis=0)
    if counts.size == 0 or np.any(counts != counts[0]):
        raise CorruptMatrixError(f"columns hold differing nonzero counts: {sorted(set(counts.tolist()))}")

    # argsort on the boolean support, stable, keeps rows ascending
    order = np.argsort(D == 0, axis=0, kind="stable")[: counts[0]].T
    signs = np.take_along_axis(D.T, order, axis=1)
    return SparseTernaryMatrix(n=D.shape[0], m=D.shape[1], k=int(counts[0]), indices=order, signs=signs)


class SeededRng:
    """
    Reproducible random stream.

    Wraps numpy's Generator over the PCG64 bit generator; equal seeds give
    equal streams.
    """

    algorithm = RNG_ALGORITHM

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._generator = np.random.Generator(np.random.PCG64(self.seed))

    def uniform(self, low: float = 0.0, high: float = 1.0, size=None) -> np.ndarray:
        return self._generator.uniform(low, high, size)

    def integers(self, low: int, high: int, size=None) -> np.ndarray:
        return self._generator.integers(low, high, size=size)

    def permutation(self, n: int) -> np.ndarray:
        return self._generator.permutation(n)

    def standard_normal(self, size=None) -> np.ndarray:
        return self._generator.standard_normal(size)

    @property
    def state(self) -> Dict[str, Any]:
        """Bit generator state (restorable via the setter)."""
        return self._generator.bit_generator.state

    @state.setter
    def state(self, value: Dict[str, Any]):
        self._generator.bit_generator.state = value

    def __repr__(self):
        return f"SeededRng(seed={self.seed}, algorithm='{self.algorithm}')"
