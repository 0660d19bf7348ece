import itertools
import json
import math

import numpy as np
import pytest

from carleman.dynamics import PolynomialSystem
from carleman.linalg import eigendecompose
from carleman.tensor import SparseCoupling
from carleman.theory import (
    ResonantShiftError,
    build_eigenvector,
    build_resolvent,
    catalan_product_sum,
    level_dimensions,
    materialize_carleman,
    shift_value,
    total_dimension,
    verify_block_bounds,
    verify_theory_suite,
    xi_recursion,
)


def make_system(seed, n=2, coupling_scale=0.1, diagonal=False):
    rng = np.random.default_rng(seed)
    if diagonal:
        F1 = np.diag(-np.sort(rng.uniform(0.5, 3.0, size=n)))
    else:
        F1 = 0.3 * rng.standard_normal((n, n))
        F1 -= (np.linalg.eigvals(F1).real.max() + 1.0) * np.eye(n)
    entries = [
        (r, (a, b), float(rng.standard_normal()))
        for r in range(n)
        for a in range(n)
        for b in range(n)
    ]
    raw = SparseCoupling(n, 2, entries)
    return PolynomialSystem(n, F1, raw.scaled(coupling_scale / raw.norm1()))


def oracle_xi(system, decomp, positions, m, k):
    """Plain recursive ξ with no memoization — independent of the library path."""
    if k == 0:
        return decomp.right_vectors[:, positions[m]].astype(complex)
    n = system.n
    out = np.zeros(n, dtype=complex)
    for a in range(k):
        left = oracle_xi(system, decomp, positions, m, a)
        if a >= 1:
            left = oracle_resolvent(decomp, positions[m : m + a + 1]) @ left
        right = oracle_xi(system, decomp, positions, m + a + 1, k - 1 - a)
        if k - 1 - a >= 1:
            right = (
                oracle_resolvent(decomp, positions[m + a + 1 : m + k + 1]) @ right
            )
        out += system.coupling.apply(np.kron(left, right))
    return out


def oracle_resolvent(decomp, indices):
    s = sum(decomp.eigenvalues[i] for i in indices)
    W = decomp.right_vectors
    F1 = (W * decomp.eigenvalues) @ decomp.left_vectors
    return np.linalg.inv(s * np.eye(decomp.n) - F1)


class TestResolvent:
    def test_diagonal_worked_example(self):
        d = eigendecompose(np.diag([-1.0, -2.5]))
        G = build_resolvent(d, (0, 0))  # shift -1 + -1 = -2
        assert np.allclose(G, np.diag([-1.0, 2.0]))

    def test_resonant_shift_raises(self):
        d = eigendecompose(np.diag([-1.0, -2.0]))
        with pytest.raises(ResonantShiftError):
            build_resolvent(d, (0, 0))  # -2 is itself an eigenvalue

    def test_matches_direct_inverse(self):
        system = make_system(5, n=3)
        d = eigendecompose(system.F1)
        for indices in [(0, 1), (2, 2), (0, 1, 2)]:
            got = build_resolvent(d, indices)
            want = np.linalg.inv(
                shift_value(d, indices) * np.eye(3) - system.F1
            )
            assert np.abs(got - want).max() < 1e-9

    def test_empty_indices_rejected(self):
        d = eigendecompose(np.diag([-1.0]))
        with pytest.raises(ValueError):
            build_resolvent(d, ())


class TestXiRecursion:
    def test_order_zero_is_eigencolumn(self):
        system = make_system(1)
        d = eigendecompose(system.F1)
        assert np.allclose(xi_recursion(system, d, (1, 0), 0), d.right_vectors[:, 1])

    def test_order_one_is_coupling_of_eigencolumns(self):
        system = make_system(2)
        d = eigendecompose(system.F1)
        got = xi_recursion(system, d, (0, 1), 1)
        e0, e1 = d.right_vectors[:, 0], d.right_vectors[:, 1]
        assert np.allclose(got, system.coupling.apply(np.kron(e0, e1)))

    @pytest.mark.parametrize("seed", [3, 4, 5])
    def test_matches_unmemoized_oracle(self, seed):
        system = make_system(seed, n=2)
        d = eigendecompose(system.F1)
        rng = np.random.default_rng(seed + 100)
        positions = tuple(rng.integers(0, 2, size=5).tolist())
        for k in (1, 2, 3, 4):
            got = xi_recursion(system, d, positions, k)
            want = oracle_xi(system, d, positions, 0, k)
            assert np.abs(got - want).max() < 1e-10

    def test_out_of_range_slot(self):
        system = make_system(6)
        d = eigendecompose(system.F1)
        with pytest.raises(IndexError):
            xi_recursion(system, d, (0, 1), 2)


def back_substitution_eigenvector(system, decomp, positions, N):
    """Independent oracle: solve the block-triangular eigenproblem downward.

    Starting from the top block (the Kronecker product of eigencolumns at
    level j = len(positions)), solve (λI − A_kk) w_k = A_{k,k+1} w_{k+1}
    level by level using the dense materialized generator.
    """
    n = system.n
    j = len(positions)
    lam = shift_value(decomp, positions)
    A = materialize_carleman(system, N)
    dims = level_dimensions(n, N)
    offsets = np.concatenate([[0], np.cumsum(dims)]).astype(int)

    blocks = [np.zeros(dims[m], dtype=complex) for m in range(N)]
    top = np.array([1.0 + 0j])
    for p in positions:
        top = np.kron(top, decomp.right_vectors[:, p])
    blocks[j - 1] = top
    for k in range(j - 1, 0, -1):
        rows = slice(offsets[k - 1], offsets[k])
        cols = slice(offsets[k], offsets[k + 1])
        Akk = A[rows, rows]
        rhs = A[rows, cols] @ blocks[k]
        M = lam * np.eye(dims[k - 1]) - Akk
        eig_k = np.linalg.eigvals(Akk)
        if np.abs(eig_k - lam).min() < 1e-8:
            # Fredholm alternative: solve on the complement, check compatibility
            w, res, *_ = np.linalg.lstsq(M, rhs, rcond=None)
            assert np.abs(M @ w - rhs).max() < 1e-8, "incompatible resonant system"
            blocks[k - 1] = w
        else:
            blocks[k - 1] = np.linalg.solve(M, rhs)
    return lam, np.concatenate(blocks)


class TestBuildEigenvector:
    def test_level_one_is_plain_eigenvector(self):
        system = make_system(7)
        d = eigendecompose(system.F1)
        vec = build_eigenvector(system, d, (1,), N=3)
        assert np.allclose(vec.block(1), d.right_vectors[:, 1])
        assert np.allclose(vec.block(2), 0) and np.allclose(vec.block(3), 0)
        assert vec.eigenvalue == pytest.approx(d.eigenvalues[1])

    def test_first_subdiagonal_block_formula(self):
        # level-2 eigenvector: w1 = G(0,1) F2 (e_a ⊗ e_b)
        system = make_system(8)
        d = eigendecompose(system.F1)
        vec = build_eigenvector(system, d, (0, 1), N=2)
        G = build_resolvent(d, (0, 1))
        e0, e1 = d.right_vectors[:, 0], d.right_vectors[:, 1]
        want = G @ system.coupling.apply(np.kron(e0, e1))
        assert np.abs(vec.block(1) - want).max() < 1e-12

    @pytest.mark.parametrize("seed", [11, 12])
    def test_matches_back_substitution_oracle(self, seed):
        system = make_system(seed, n=2)
        d = eigendecompose(system.F1)
        N = 4
        for tup in [(0,), (0, 1), (1, 1, 0), (0, 0, 1, 1)]:
            vec = build_eigenvector(system, d, tup, N=N)
            lam, want = back_substitution_eigenvector(system, d, tup, N)
            assert vec.eigenvalue == pytest.approx(lam)
            assert np.abs(vec.assemble() - want).max() < 1e-8

    def test_residual_against_dense_generator(self):
        system = make_system(13, n=2)
        d = eigendecompose(system.F1)
        A = materialize_carleman(system, 4)
        for j in (1, 2, 3, 4):
            for tup in itertools.product(range(2), repeat=j):
                vec = build_eigenvector(system, d, tup, N=4)
                v = vec.assemble()
                res = np.abs(A @ v - vec.eigenvalue * v).sum()
                assert res <= 1e-8 * max(np.abs(v).sum(), 1.0)

    def test_eigenvalues_match_dense_spectrum(self):
        system = make_system(14, n=2)
        d = eigendecompose(system.F1)
        A = materialize_carleman(system, 4)
        dense = np.sort_complex(np.linalg.eigvals(A))
        constructed = []
        for j in range(1, 5):
            for tup in itertools.product(range(2), repeat=j):
                constructed.append(shift_value(d, tup))
        constructed = np.sort_complex(np.array(constructed))
        assert np.abs(dense - constructed).max() < 1e-6

    def test_zero_coupling_gives_pure_tensor_eigenvectors(self):
        F1 = np.diag([-1.0, -2.2])
        system = PolynomialSystem(2, F1, SparseCoupling.empty(2))
        d = eigendecompose(F1)
        vec = build_eigenvector(system, d, (0, 1, 1), N=4)
        top = np.zeros(8)
        # e_0 ⊗ e_1 ⊗ e_1 in row-major flattening
        top[0 * 4 + 1 * 2 + 1] = 1.0
        assert np.allclose(vec.block(3), top)
        for j in (1, 2, 4):
            assert np.allclose(vec.block(j), 0.0)

    def test_truncation_too_small_rejected(self):
        system = make_system(15)
        d = eigendecompose(system.F1)
        with pytest.raises(ValueError):
            build_eigenvector(system, d, (0, 1), N=1)


class TestCatalan:
    def test_single_slot_is_catalan_number(self):
        assert catalan_product_sum(4, 1) == (14, 14)

    def test_zero_weight(self):
        for r in (1, 2, 5):
            assert catalan_product_sum(0, r) == (1, 1)

    def test_small_case_by_hand(self):
        # compositions of 2 into 2: (2,0),(0,2),(1,1) -> 2 + 2 + 1 = 5
        assert catalan_product_sum(2, 2) == (5, 5)

    def test_identity_exact_up_to_k12_r8(self):
        for k in range(13):
            for r in range(1, 9):
                conv, closed = catalan_product_sum(k, r)
                assert conv == closed, (k, r)

    def test_validation(self):
        with pytest.raises(ValueError):
            catalan_product_sum(-1, 2)
        with pytest.raises(ValueError):
            catalan_product_sum(2, 0)


class TestMaterialize:
    def test_dimensions(self):
        system = make_system(16, n=3)
        assert level_dimensions(3, 3) == [3, 9, 27]
        assert total_dimension(3, 3) == 39
        assert materialize_carleman(system, 3).shape == (39, 39)

    def test_refuses_oversized(self):
        system = make_system(17, n=3)
        with pytest.raises(ValueError):
            materialize_carleman(system, 10)


class TestVerifyBlockBounds:
    def test_passes_on_random_stable_system(self):
        report = verify_block_bounds(make_system(21, n=2), 3)
        assert report["all_passed"]
        assert not report["skipped"]
        names = {c["name"] for c in report["checks"]}
        assert "eigen-residual" in names
        assert any(name.startswith("xi-catalan") for name in names)
        assert any(name.startswith("zeta-decay") for name in names)

    def test_coupling_scale_times_ten_still_passes(self):
        report = verify_block_bounds(make_system(21, n=2, coupling_scale=1.0), 3)
        assert report["all_passed"]

    def test_resonant_spectrum_skips_gap_bounds(self):
        # purely imaginary pair: literal gap is zero
        F1 = np.array([[0.0, -1.0], [1.0, 0.0]])
        system = PolynomialSystem(2, F1, SparseCoupling(2, 2, [(0, (0, 0), 0.05)]))
        report = verify_block_bounds(system, 3)
        assert report["resonant"]
        assert "zeta-decay" in report["skipped"]

    def test_report_is_json_serializable(self):
        report = verify_block_bounds(make_system(22, n=2), 3)
        json.dumps(report)

    def test_degree_three_rejected(self):
        system = PolynomialSystem(
            2, -np.eye(2), SparseCoupling(2, 3, [(0, (0, 0, 0), 0.1)])
        )
        with pytest.raises(ValueError):
            verify_block_bounds(system, 3)

    def test_diagonal_f1_zero_coupling_identity_basis(self):
        F1 = np.diag([-1.0, -2.2])
        system = PolynomialSystem(2, F1, SparseCoupling.empty(2))
        report = verify_block_bounds(system, 3)
        assert report["all_passed"]


class TestVerifyTheorySuite:
    def test_suite_passes_and_serializes(self):
        report = verify_theory_suite(n=2, N=3, seed=0, instances=2)
        assert report["all_passed"]
        json.dumps(report)
        assert len(report["instances"]) == 2
        for inst in report["instances"]:
            names = [c["name"] for c in inst["checks"]]
            assert "spectrum-is-partial-sums" in names

    def test_different_seeds_draw_different_systems(self):
        a = verify_theory_suite(n=2, N=3, seed=1, instances=1)
        b = verify_theory_suite(n=2, N=3, seed=2, instances=1)
        da = a["instances"][0]["delta_literal"]
        db = b["instances"][0]["delta_literal"]
        assert da != db
