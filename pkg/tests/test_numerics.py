"""Tests for ternsense.numerics module."""

import numpy as np
import pytest

from ternsense.numerics import (
    CorruptMatrixError,
    DimensionError,
    SeededRng,
    SparseTernaryMatrix,
    dense_matvec,
    densify,
    sparsify,
    ternary_matmat,
    ternary_matvec,
)


def random_ternary(n: int, m: int, k: int, generator: np.random.Generator) -> SparseTernaryMatrix:
    indices = np.array([np.sort(generator.choice(n, size=k, replace=False)) for _ in range(m)])
    signs = generator.choice([-1, 1], size=(m, k))
    return SparseTernaryMatrix(n=n, m=m, k=k, indices=indices, signs=signs)


class TestDenseMatvec:
    """Tests for dense_matvec."""

    def test_identity(self):
        """Test that the identity returns x."""
        np.testing.assert_array_equal(dense_matvec(np.eye(2), [3.0, 4.0]), [3.0, 4.0])

    def test_single_row(self):
        """Test a hand-computed dot product."""
        np.testing.assert_array_equal(dense_matvec([[1.0, -1.0]], [5.0, 2.0]), [3.0])

    def test_zero_matrix(self):
        """Test that a zero matrix gives a zero vector."""
        np.testing.assert_array_equal(dense_matvec(np.zeros((3, 2)), [7.0, -1.0]), np.zeros(3))

    def test_dimension_mismatch(self):
        """Test that mismatched operands raise DimensionError."""
        with pytest.raises(DimensionError):
            dense_matvec(np.eye(2), [1.0, 2.0, 3.0])


class TestSparseTernaryMatrix:
    """Tests for SparseTernaryMatrix construction and validation."""

    def test_from_columns(self):
        """Test building from (row, sign) lists."""
        T = SparseTernaryMatrix.from_columns(3, [[(0, 1), (2, -1)], [(1, -1), (2, 1)]])
        assert (T.n, T.m, T.k) == (3, 2, 2)
        assert T.nnz == 4
        assert T.columns == [[(0, 1), (2, -1)], [(1, -1), (2, 1)]]

    def test_row_index_out_of_range(self):
        """Test that an index >= n is rejected."""
        with pytest.raises(CorruptMatrixError):
            SparseTernaryMatrix.from_columns(3, [[(0, 1), (3, 1)]])

    def test_duplicate_index(self):
        """Test that repeated rows within a column are rejected."""
        with pytest.raises(CorruptMatrixError):
            SparseTernaryMatrix.from_columns(3, [[(1, 1), (1, -1)]])

    def test_unordered_index(self):
        """Test that descending rows within a column are rejected."""
        with pytest.raises(CorruptMatrixError):
            SparseTernaryMatrix.from_columns(3, [[(2, 1), (0, 1)]])

    def test_bad_sign(self):
        """Test that signs outside {-1, +1} are rejected."""
        with pytest.raises(CorruptMatrixError):
            SparseTernaryMatrix.from_columns(3, [[(0, 0), (1, 1)]])

    def test_unequal_columns(self):
        """Test that columns with different counts are rejected."""
        with pytest.raises(CorruptMatrixError):
            SparseTernaryMatrix.from_columns(3, [[(0, 1)], [(0, 1), (1, 1)]])

    def test_layout_mismatch(self):
        """Test that arrays not matching (m, k) are rejected."""
        with pytest.raises(CorruptMatrixError):
            SparseTernaryMatrix(n=4, m=2, k=2, indices=np.array([0, 1, 2]), signs=np.array([1, 1, 1]))

    def test_arrays_read_only(self):
        """Test that the stored arrays cannot be mutated."""
        T = SparseTernaryMatrix.from_columns(2, [[(0, 1)]])
        with pytest.raises(ValueError):
            T.indices[0, 0] = 1

    def test_equality_and_hash(self):
        """Test value equality and hashing."""
        a = SparseTernaryMatrix.from_columns(3, [[(0, 1), (2, -1)]])
        b = SparseTernaryMatrix.from_columns(3, [[(0, 1), (2, -1)]])
        c = SparseTernaryMatrix.from_columns(3, [[(0, 1), (2, 1)]])
        assert a == b
        assert hash(a) == hash(b)
        assert a != c


class TestTernaryMatvec:
    """Tests for ternary_matvec and ternary_matmat."""

    def test_signed_sum(self):
        """Test a hand-evaluated signed sum."""
        T = SparseTernaryMatrix.from_columns(3, [[(0, 1), (2, -1)]])
        np.testing.assert_array_equal(ternary_matvec(T, [1.0, 0.0, 4.0]), [-3.0])

    def test_zero_input(self):
        """Test that x = 0 gives zero measurements."""
        T = random_ternary(8, 3, 2, np.random.default_rng(0))
        np.testing.assert_array_equal(ternary_matvec(T, np.zeros(8)), np.zeros(3))

    def test_matches_dense_oracle_exactly(self):
        """Test bit-exact agreement with dense_matvec on the densified transpose."""
        generator = np.random.default_rng(1)
        for _ in range(100):
            n = int(generator.integers(1, 33))
            m = int(generator.integers(1, 10))
            k = int(generator.integers(1, n + 1))
            T = random_ternary(n, m, k, generator)
            x = generator.standard_normal(n)
            np.testing.assert_array_equal(ternary_matvec(T, x), dense_matvec(densify(T).T, x))

    def test_linearity(self):
        """Test linearity to 1e-12 relative."""
        generator = np.random.default_rng(2)
        T = random_ternary(20, 6, 5, generator)
        x, z = generator.standard_normal(20), generator.standard_normal(20)
        combined = ternary_matvec(T, 2.5 * x - 0.75 * z)
        expected = 2.5 * ternary_matvec(T, x) - 0.75 * ternary_matvec(T, z)
        np.testing.assert_allclose(combined, expected, rtol=1e-12, atol=1e-12)

    def test_matmat_rows_match_matvec(self):
        """Test that the batched form is row-wise ternary_matvec."""
        generator = np.random.default_rng(3)
        T = random_ternary(16, 4, 3, generator)
        X = generator.standard_normal((5, 16))
        Y = ternary_matmat(T, X)
        for row in range(5):
            np.testing.assert_array_equal(Y[row], ternary_matvec(T, X[row]))

    def test_dimension_mismatch(self):
        """Test that a wrong-length x raises DimensionError."""
        T = SparseTernaryMatrix.from_columns(3, [[(0, 1)]])
        with pytest.raises(DimensionError):
            ternary_matvec(T, np.zeros(4))


class TestDensify:
    """Tests for densify and sparsify."""

    def test_single_entry(self):
        """Test expansion of a 2x1 matrix with one negative entry."""
        T = SparseTernaryMatrix.from_columns(2, [[(1, -1)]])
        np.testing.assert_array_equal(densify(T), [[0.0], [-1.0]])

    def test_first_row_ones(self):
        """Test that columns {(0, +1)} fill the first row with ones."""
        T = SparseTernaryMatrix.from_columns(3, [[(0, 1)]] * 4)
        expected = np.zeros((3, 4))
        expected[0] = 1.0
        np.testing.assert_array_equal(densify(T), expected)

    def test_round_trip(self):
        """Test that sparsify inverts densify."""
        generator = np.random.default_rng(4)
        for _ in range(20):
            T = random_ternary(12, 5, 4, generator)
            assert sparsify(densify(T)) == T

    def test_sparsify_rejects_non_ternary(self):
        """Test that entries outside {-1, 0, +1} are rejected."""
        with pytest.raises(CorruptMatrixError):
            sparsify([[2.0], [0.0]])

    def test_sparsify_rejects_unequal_counts(self):
        """Test that columns with differing nonzero counts are rejected."""
        with pytest.raises(CorruptMatrixError):
            sparsify([[1.0, 1.0], [0.0, -1.0]])


class TestSeededRng:
    """Tests for SeededRng."""

    def test_equal_seeds_equal_streams(self):
        """Test that equal seeds give equal first 10^4 draws."""
        a, b = SeededRng(42), SeededRng(42)
        np.testing.assert_array_equal(a.uniform(size=10_000), b.uniform(size=10_000))

    def test_different_seeds_differ(self):
        """Test that different seeds give different streams."""
        assert not np.array_equal(SeededRng(1).uniform(size=10), SeededRng(2).uniform(size=10))

    def test_state_restore(self):
        """Test that restoring the state replays the stream."""
        rng = SeededRng(7)
        rng.uniform(size=5)
        saved = rng.state
        first = rng.permutation(10)
        rng.state = saved
        np.testing.assert_array_equal(rng.permutation(10), first)
