"""Tests for ternsense.projection module."""

import itertools

import numpy as np
import pytest

from ternsense.numerics import densify
from ternsense.projection import (
    SensingWeights,
    apply_mask,
    approximation_error,
    binarize,
    compute_alpha,
    mask_to_dense,
    refresh,
    top_k_select,
)


def column(*values):
    return np.array(values, dtype=np.float64)[:, np.newaxis]


class TestTopKSelect:
    """Tests for top_k_select."""

    def test_largest_magnitudes(self):
        """Test picking the two largest magnitudes."""
        np.testing.assert_array_equal(top_k_select(column(3, -1, 0.5, -2), 2), [[0, 3]])

    def test_full_selection(self):
        """Test that k = n selects every row."""
        np.testing.assert_array_equal(top_k_select(column(3, -1, 0.5), 3), [[0, 1, 2]])

    def test_tie_goes_to_lowest_index(self):
        """Test that equal magnitudes favor the lower row."""
        np.testing.assert_array_equal(top_k_select(column(1, -1), 1), [[0]])

    def test_per_column(self):
        """Test that each column is selected independently."""
        theta = np.array([[1.0, 0.0], [0.0, 5.0], [2.0, 4.0]])
        np.testing.assert_array_equal(top_k_select(theta, 2), [[0, 2], [1, 2]])

    def test_invalid_k(self):
        """Test that k outside [1, n] raises ValueError."""
        with pytest.raises(ValueError):
            top_k_select(column(1, 2), 3)
        with pytest.raises(ValueError):
            top_k_select(column(1, 2), 0)


class TestApplyMask:
    """Tests for apply_mask and mask_to_dense."""

    def test_full_mask_is_identity(self):
        """Test that a full mask keeps theta."""
        theta = np.array([[1.0, -2.0], [3.0, 4.0]])
        np.testing.assert_array_equal(apply_mask(theta, top_k_select(theta, 2)), theta)

    def test_single_entry(self):
        """Test masking (5, -7) with mask {1}."""
        np.testing.assert_array_equal(apply_mask(column(5, -7), np.array([[1]])), column(0, -7))

    def test_zero_theta(self):
        """Test that zero theta stays zero."""
        theta = np.zeros((4, 2))
        np.testing.assert_array_equal(apply_mask(theta, top_k_select(theta, 2)), theta)

    def test_mask_to_dense(self):
        """Test the boolean view of a mask."""
        dense = mask_to_dense(np.array([[0, 2], [1, 2]]), 3)
        np.testing.assert_array_equal(dense, [[True, False], [False, True], [True, True]])


class TestBinarize:
    """Tests for binarize."""

    def test_signs(self):
        """Test sign extraction on the mask."""
        T = binarize(column(0.5, -3), np.array([[0, 1]]))
        assert T.columns == [[(0, 1), (1, -1)]]

    def test_all_positive(self):
        """Test that positive values give an all +1 column."""
        T = binarize(column(0.1, 2.0, 3.0), np.array([[0, 1, 2]]))
        assert all(sign == 1 for _, sign in T.columns[0])

    def test_zero_maps_to_plus_one(self):
        """Test that a masked zero becomes +1."""
        T = binarize(column(0, -2, 7), np.array([[0, 1, 2]]))
        assert T.columns == [[(0, 1), (1, -1), (2, 1)]]
        assert T.k == 3


class TestComputeAlpha:
    """Tests for compute_alpha."""

    def test_mean_absolute_value(self):
        """Test the l1 norm over k."""
        assert compute_alpha([1.0, -2.0, 0.0, 3.0], 3) == 2.0

    def test_zero_column(self):
        """Test that an all-zero column gives zero."""
        assert compute_alpha(np.zeros(4), 2) == 0.0

    def test_constant_column(self):
        """Test that k = n copies of c give |c|."""
        assert compute_alpha(np.full(4, -1.5), 4) == 1.5

    def test_non_positive_k(self):
        """Test that k <= 0 raises ValueError."""
        with pytest.raises(ValueError):
            compute_alpha([1.0], 0)


class TestApproximationError:
    """Tests for approximation_error."""

    def test_exact_fit(self):
        """Test zero error when theta = alpha * theta_sb."""
        assert approximation_error([2.0, -2.0, 0.0], [1.0, -1.0, 0.0], 2.0) == 0.0

    def test_hand_example(self):
        """Test (1-2)^2 + 0 + 0 + (3-2)^2 = 2."""
        assert approximation_error([1.0, -2.0, 0.0, 3.0], [1.0, -1.0, 0.0, 1.0], 2.0) == 2.0

    def test_homogeneity(self):
        """Test that scaling theta by c scales the minimal error by c^2."""
        theta = np.array([0.3, -1.2, 0.7, 2.0])
        base = SensingWeights.create(theta[:, np.newaxis], 2)
        scaled = SensingWeights.create(3.0 * theta[:, np.newaxis], 2)
        e_base = approximation_error(theta, densify(base.theta_sb)[:, 0], base.alpha[0])
        e_scaled = approximation_error(3.0 * theta, densify(scaled.theta_sb)[:, 0], scaled.alpha[0])
        assert e_scaled == pytest.approx(9.0 * e_base, rel=1e-12)


class TestRefresh:
    """Tests for SensingWeights.refresh."""

    def test_hand_example(self):
        """Test the full composition on a 4x1 column."""
        weights = SensingWeights.create(column(3, -1, 0.5, -2), 2)
        assert weights.theta_sb.columns == [[(0, 1), (3, -1)]]
        assert weights.alpha[0] == 2.5

    def test_full_positive_mask(self):
        """Test that k = n on positive theta gives all +1 and alpha = column mean."""
        theta = np.array([[1.0, 0.5], [2.0, 0.25], [3.0, 0.75]])
        weights = SensingWeights.create(theta, 3)
        np.testing.assert_array_equal(densify(weights.theta_sb), np.ones((3, 2)))
        np.testing.assert_allclose(weights.alpha, theta.mean(axis=0), rtol=1e-15)

    def test_refresh_is_deterministic(self):
        """Test that refreshing an unchanged theta reproduces the caches."""
        weights = SensingWeights.create(np.random.default_rng(0).standard_normal((10, 4)), 3)
        mask, theta_sb, alpha = weights.mask.copy(), weights.theta_sb, weights.alpha.copy()
        refresh(weights)
        np.testing.assert_array_equal(weights.mask, mask)
        assert weights.theta_sb == theta_sb
        np.testing.assert_array_equal(weights.alpha, alpha)

    def test_column_invariants(self):
        """Test exact k, support equality and alpha sign on random weights."""
        generator = np.random.default_rng(1)
        theta = generator.standard_normal((32, 8))
        weights = SensingWeights.create(theta, 5)
        theta_s = apply_mask(theta, weights.mask)

        dense = densify(weights.theta_sb)
        assert np.all(np.count_nonzero(dense, axis=0) == 5)
        np.testing.assert_array_equal(dense != 0, mask_to_dense(weights.mask, 32))
        np.testing.assert_array_equal(weights.theta_sb.indices, weights.mask)
        assert np.all(weights.alpha > 0)
        for j in range(8):
            assert abs(weights.alpha[j] - compute_alpha(theta_s[:, j], 5)) <= 1e-12

    def test_non_finite_theta(self):
        """Test that non-finite theta is rejected."""
        weights = SensingWeights.create(column(1, 2), 1)
        weights.theta[0, 0] = np.nan
        with pytest.raises(ValueError):
            weights.refresh()

    def test_scaled_projection(self):
        """Test that scaled_projection is alpha * theta_sb."""
        weights = SensingWeights.create(column(3, -1, 0.5, -2), 2)
        np.testing.assert_array_equal(weights.scaled_projection(), column(2.5, 0, 0, -2.5))


class TestOptimality:
    """Brute-force check that sign and mean magnitude minimize the error."""

    def test_exhaustive_sign_patterns(self):
        """Test against every sign pattern on the mask with its optimal scale."""
        generator = np.random.default_rng(2)
        for _ in range(100):
            n = int(generator.integers(1, 7))
            k = int(generator.integers(1, n + 1))
            theta = generator.standard_normal(n)
            weights = SensingWeights.create(theta[:, np.newaxis], k)
            best = approximation_error(theta, densify(weights.theta_sb)[:, 0], weights.alpha[0])

            support = weights.mask[0]
            for pattern in itertools.product((-1.0, 1.0), repeat=k):
                candidate = np.zeros(n)
                candidate[support] = pattern
                scale = float(theta @ candidate) / k
                assert best <= approximation_error(theta, candidate, scale) + 1e-12
