import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from carleman.linalg import (
    DefectiveMatrixError,
    condition_number_1,
    eigendecompose,
    induced_norm,
    spectral_radius,
)
from carleman.models import build_fpu


def random_matrix(seed, n):
    return np.random.default_rng(seed).standard_normal((n, n))


class TestEigendecompose:
    def test_diagonal_matrix_sorted_descending_real(self):
        d = eigendecompose(np.diag([-2.5, -1.0, -7.0]))
        assert np.allclose(d.eigenvalues, [-1.0, -2.5, -7.0])

    def test_columns_have_unit_l1_norm(self):
        d = eigendecompose(random_matrix(1, 6))
        col_norms = np.abs(d.right_vectors).sum(axis=0)
        assert np.allclose(col_norms, 1.0, atol=1e-12)

    def test_residual_certificate(self):
        A = random_matrix(2, 8)
        d = eigendecompose(A, tol=1e-10)
        res = np.abs(A @ d.right_vectors - d.right_vectors * d.eigenvalues).sum(axis=0).max()
        assert res <= 1e-10 * max(np.abs(A).sum(axis=0).max(), 1.0)
        assert res <= d.residual_bound + 1e-30

    def test_biorthogonality(self):
        d = eigendecompose(random_matrix(3, 7))
        gram = d.left_vectors @ d.right_vectors
        assert np.abs(gram - np.eye(7)).max() <= 1e-9

    def test_reconstruction(self):
        A = random_matrix(4, 5)
        d = eigendecompose(A)
        rec = (d.right_vectors * d.eigenvalues) @ d.left_vectors
        assert np.abs(rec - A).max() <= 100 * 1e-10 * np.abs(A).sum(axis=0).max()

    def test_real_input_spectrum_closed_under_conjugation(self):
        # rotation block gives an exact complex pair
        A = np.array([[0.0, -2.0, 0.1], [2.0, 0.0, 0.0], [0.0, 0.0, -1.0]])
        d = eigendecompose(A)
        lam = d.eigenvalues
        for z in lam:
            assert np.abs(lam - np.conj(z)).min() < 1e-12

    def test_sort_order_real_desc_then_imag_asc(self):
        A = np.array([[0.0, -3.0], [3.0, 0.0]])  # eigenvalues ±3i
        d = eigendecompose(A)
        assert d.eigenvalues[0].imag < d.eigenvalues[1].imag

    def test_jordan_block_is_defective(self):
        J = np.array([[1.0, 1.0], [0.0, 1.0]])
        with pytest.raises(DefectiveMatrixError):
            eigendecompose(J)

    def test_dimension_cap(self):
        with pytest.raises(ValueError):
            eigendecompose(np.eye(257))

    def test_non_square_rejected(self):
        with pytest.raises(ValueError):
            eigendecompose(np.ones((3, 2)))


class TestInducedNorm:
    def test_p1_and_pinf_against_direct_sums(self, rng):
        A = rng.standard_normal((5, 7))
        assert induced_norm(A, 1) == pytest.approx(np.abs(A).sum(axis=0).max())
        assert induced_norm(A, "inf") == pytest.approx(np.abs(A).sum(axis=1).max())

    def test_p2_against_svd(self, rng):
        for _ in range(5):
            A = rng.standard_normal((6, 4))
            assert induced_norm(A, 2) == pytest.approx(
                np.linalg.norm(A, 2), rel=1e-8
            )

    @settings(max_examples=30, deadline=None)
    @given(st.integers(min_value=0, max_value=2**32 - 1))
    def test_two_norm_interpolation_inequality(self, seed):
        A = np.random.default_rng(seed).standard_normal((4, 4))
        n1, n2, ninf = (induced_norm(A, p) for p in (1, 2, "inf"))
        assert n2 <= np.sqrt(n1 * ninf) * (1 + 1e-9)

    def test_invalid_p(self):
        with pytest.raises(ValueError):
            induced_norm(np.eye(2), 3)

    def test_sparse_coupling_norms_match_dense(self, rng):
        from carleman.tensor import SparseCoupling

        entries = [
            (int(r), (int(a), int(b)), float(v))
            for r, a, b, v in zip(
                rng.integers(0, 3, 12),
                rng.integers(0, 3, 12),
                rng.integers(0, 3, 12),
                rng.standard_normal(12),
            )
        ]
        # collapse duplicate (row, col) pairs the way the constructor expects
        seen = {}
        for r, (a, b), v in entries:
            seen[(r, a, b)] = v
        entries = [(r, (a, b), v) for (r, a, b), v in seen.items()]
        c = SparseCoupling(3, 2, entries)
        dense = c.to_dense()
        assert induced_norm(c, 1) == pytest.approx(np.abs(dense).sum(axis=0).max())
        assert induced_norm(c, "inf") == pytest.approx(np.abs(dense).sum(axis=1).max())
        assert induced_norm(c, 2) == pytest.approx(np.linalg.norm(dense, 2), rel=1e-8)


class TestConditionNumber:
    def test_identity_is_one(self):
        assert condition_number_1(eigendecompose(np.diag([-1.0, -2.0]))) == pytest.approx(1.0)

    def test_fpu_chain_against_dense_inverse(self):
        system, _ = build_fpu(7, k=1.0)
        d = eigendecompose(system.F1)
        W = d.right_vectors
        oracle = np.abs(W).sum(axis=0).max() * np.abs(np.linalg.inv(W)).sum(axis=0).max()
        assert condition_number_1(d) == pytest.approx(oracle, rel=1e-8)


def test_spectral_radius(rng):
    A = rng.standard_normal((6, 6))
    assert spectral_radius(A) == pytest.approx(np.abs(np.linalg.eigvals(A)).max())
