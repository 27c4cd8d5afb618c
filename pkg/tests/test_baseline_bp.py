"""Tests for ternsense.baseline module."""

import numpy as np
import pytest
from pydantic import ValidationError

from ternsense.baseline import (
    BpConfig,
    ZeroOperatorError,
    bp_reconstruct,
    bp_reconstruct_batch,
    dct_basis,
    ista_solve,
    ista_solve_batch,
    random_ternary_projection,
    soft_threshold,
)
from ternsense.numerics import DimensionError, SeededRng


class TestRandomTernaryProjection:
    """Tests for random_ternary_projection."""

    def test_codomain(self):
        """Test that every entry is -1, 0 or +1."""
        phi = random_ternary_projection(64, 16, SeededRng(0))
        assert phi.shape == (16, 64)
        assert set(np.unique(phi)) <= {-1.0, 0.0, 1.0}

    def test_equal_seeds(self):
        """Test that equal seeds give equal matrices."""
        np.testing.assert_array_equal(
            random_ternary_projection(32, 8, SeededRng(3)),
            random_ternary_projection(32, 8, SeededRng(3)),
        )

    def test_symbol_frequencies(self):
        """Test that each symbol appears within 1% of one third over 10^5 entries."""
        phi = random_ternary_projection(1000, 100, SeededRng(1))
        for symbol in (-1.0, 0.0, 1.0):
            assert abs(np.mean(phi == symbol) - 1.0 / 3.0) < 0.01

    def test_invalid_dimensions(self):
        """Test that m >= n is rejected."""
        with pytest.raises(ValueError):
            random_ternary_projection(16, 16, SeededRng(0))


class TestDctBasis:
    """Tests for dct_basis."""

    @pytest.mark.parametrize("side", [1, 4, 8])
    def test_orthonormal(self, side):
        """Test Psi^T Psi = I."""
        psi = dct_basis(side).matrix
        np.testing.assert_allclose(psi.T @ psi, np.eye(side * side), atol=1e-10)

    def test_constant_patch_is_dc_only(self):
        """Test that a constant patch has all energy in coefficient 0."""
        coefficients = dct_basis(4).analyze(np.full(16, 3.0))
        assert coefficients[0] == pytest.approx(12.0)
        np.testing.assert_allclose(coefficients[1:], 0.0, atol=1e-10)

    def test_unit_side(self):
        """Test that S=1 gives the 1x1 identity."""
        np.testing.assert_allclose(dct_basis(1).matrix, [[1.0]])

    def test_round_trip(self):
        """Test that synthesis inverts analysis."""
        basis = dct_basis(4)
        x = np.random.default_rng(0).standard_normal(16)
        np.testing.assert_allclose(basis.synthesize(basis.analyze(x)), x, atol=1e-10)


class TestIstaSolve:
    """Tests for ista_solve and ista_solve_batch."""

    def test_identity_matches_soft_threshold(self):
        """Test the closed form soft(y, lam) for A = I."""
        y = np.array([3.0, -2.0, 0.5])
        result = ista_solve(np.eye(3), y, BpConfig(lam=0.1, tol=1e-15, max_iters=200))
        np.testing.assert_allclose(result.u, soft_threshold(y, 0.1), atol=1e-10)
        assert result.converged

    def test_zero_measurements(self):
        """Test that y = 0 gives u = 0."""
        A = np.random.default_rng(0).standard_normal((4, 8))
        result = ista_solve(A, np.zeros(4), BpConfig())
        np.testing.assert_array_equal(result.u, np.zeros(8))

    def test_objective_nonincreasing(self):
        """Test monotone objective traces on 100 random instances."""
        generator = np.random.default_rng(1)
        config = BpConfig(max_iters=200, tol=1e-12)
        for _ in range(100):
            A = generator.standard_normal((10, 20))
            y = generator.standard_normal(10)
            trace = ista_solve(A, y, config).objective
            assert np.all(np.diff(trace) <= 1e-12 * np.maximum(trace[:-1], 1.0))

    def test_optimality_at_convergence(self):
        """Test the zero-subgradient condition at the fixed point."""
        generator = np.random.default_rng(2)
        config = BpConfig(lam_ratio=0.2, max_iters=20_000, tol=1e-15)
        for _ in range(10):
            A = generator.standard_normal((8, 12)) / np.sqrt(8)
            y = generator.standard_normal(8)
            result = ista_solve(A, y, config)
            assert result.converged
            gradient = A.T @ (A @ result.u - y)
            zero = result.u == 0.0
            assert np.all(np.abs(gradient[zero]) <= result.lam + 1e-6)
            np.testing.assert_allclose(gradient[~zero], -result.lam * np.sign(result.u[~zero]), atol=1e-6)

    def test_default_lambda(self):
        """Test lam = 0.01 * ||A^T y||_inf when not given."""
        A = np.random.default_rng(3).standard_normal((5, 10))
        y = np.random.default_rng(4).standard_normal(5)
        result = ista_solve(A, y, BpConfig(max_iters=5))
        assert result.lam == pytest.approx(0.01 * np.max(np.abs(A.T @ y)))

    def test_zero_operator(self):
        """Test that an all-zero A raises ZeroOperatorError."""
        with pytest.raises(ZeroOperatorError):
            ista_solve(np.zeros((3, 4)), np.ones(3), BpConfig())

    def test_batch_matches_single(self):
        """Test that batched columns agree with single solves."""
        generator = np.random.default_rng(5)
        A = generator.standard_normal((6, 12))
        Y = generator.standard_normal((6, 4))
        config = BpConfig(max_iters=300)
        U, lam, _, _, _ = ista_solve_batch(A, Y, config)
        for column in range(4):
            single = ista_solve(A, Y[:, column], config)
            np.testing.assert_allclose(U[:, column], single.u, atol=1e-10)
            assert lam[column] == pytest.approx(single.lam)

    def test_dimension_mismatch(self):
        """Test that y of the wrong length raises DimensionError."""
        with pytest.raises(DimensionError):
            ista_solve(np.eye(3), np.zeros(4), BpConfig())

    def test_config_validation(self):
        """Test that non-positive settings are rejected."""
        with pytest.raises(ValidationError):
            BpConfig(tol=0.0)
        with pytest.raises(ValidationError):
            BpConfig(lam=-1.0)


class TestBpReconstruct:
    """Tests for bp_reconstruct and bp_reconstruct_batch."""

    def test_full_sampling_identity(self):
        """Test that Phi = I with tiny lam recovers x."""
        basis = dct_basis(4)
        x = np.random.default_rng(0).uniform(-1, 1, size=16)
        recovered = bp_reconstruct(np.eye(16), basis, x, BpConfig(lam=1e-9, tol=1e-15, max_iters=100))
        np.testing.assert_allclose(recovered, x, atol=1e-6)

    def test_sparse_support_recovery(self):
        """Test that 1-sparse DCT patches are recovered in at least 90 of 100 trials."""
        basis = dct_basis(8)
        generator = np.random.default_rng(1)
        recovered = 0
        for trial in range(100):
            phi = random_ternary_projection(64, 24, SeededRng(trial))
            u = np.zeros(64)
            index = int(generator.integers(64))
            u[index] = generator.choice([-1.0, 1.0]) * generator.uniform(1.0, 2.0)
            y = phi @ basis.synthesize(u)

            estimate = basis.analyze(bp_reconstruct(phi, basis, y, BpConfig()))
            others = np.delete(np.abs(estimate), index)
            if np.argmax(np.abs(estimate)) == index and np.all(others < 0.1 * abs(estimate[index])):
                recovered += 1
        assert recovered >= 90

    def test_batch_matches_single(self):
        """Test that the batched form agrees with per-patch recovery."""
        basis = dct_basis(4)
        phi = random_ternary_projection(16, 6, SeededRng(2))
        measurements = np.random.default_rng(3).standard_normal((3, 6))
        batch = bp_reconstruct_batch(phi, basis, measurements, BpConfig())
        assert batch.shape == (3, 16)
        for row in range(3):
            np.testing.assert_allclose(batch[row], bp_reconstruct(phi, basis, measurements[row], BpConfig()), atol=1e-10)

    def test_dimension_mismatch(self):
        """Test that Phi with the wrong width raises DimensionError."""
        with pytest.raises(DimensionError):
            bp_reconstruct(np.eye(9), dct_basis(4), np.zeros(9), BpConfig())

    def test_soft_threshold(self):
        """Test shrinkage toward zero."""
        np.testing.assert_array_equal(soft_threshold(np.array([3.0, -0.5, -2.0]), 1.0), [2.0, 0.0, -1.0])
