import itertools

import numpy as np
import pytest

from carleman.dynamics import (
    CarlemanOperator,
    PolynomialSystem,
    UnstableStepError,
    apply_carleman,
    default_step_size,
    integrate_lifted,
    integrate_reference,
    truncation_error,
)
from carleman.models import build_bernoulli
from carleman.tensor import BlockVector, SparseCoupling, lift


def bernoulli_exact(t, lam=-1.0, f=0.1, x0=0.5):
    """Closed-form solution of dx/dt = lam*x + f*x**2."""
    e = np.exp(lam * t)
    return lam * x0 * e / (lam - f * x0 * (e - 1.0))


def dense_generator(system, N):
    """Independent dense lifted generator, assembled entry by entry."""
    n, d = system.n, system.degree
    dims = [n**j for j in range(1, N + 1)]
    offsets = np.concatenate([[0], np.cumsum(dims)]).astype(int)
    D = offsets[-1]
    A = np.zeros((D, D))
    fd = {}
    for row, col, val in system.coupling.entry_list():
        fd[(row, col)] = fd.get((row, col), 0.0) + val

    def flat(idx):
        out = 0
        for i in idx:
            out = out * n + i
        return out

    for j in range(1, N + 1):
        for alpha in itertools.product(range(n), repeat=j):
            r = offsets[j - 1] + flat(alpha)
            # Kronecker-sum block: F1 acting in each slot.
            for m in range(j):
                for b in range(n):
                    beta = list(alpha)
                    beta[m] = b
                    A[r, offsets[j - 1] + flat(beta)] += system.F1[alpha[m], b]
            # Transfer block from level j + d - 1, one slot placement each.
            if j + d - 1 <= N:
                for m in range(j):
                    for (row, col), val in fd.items():
                        if row != alpha[m]:
                            continue
                        beta = alpha[:m] + col + alpha[m + 1 :]
                        A[r, offsets[j + d - 2] + flat(beta)] += val
    return A


@pytest.fixture
def quad_system(rng):
    n = 2
    F1 = np.array([[-1.0, 0.3], [0.1, -2.0]])
    entries = [
        (r, (a, b), float(rng.standard_normal()) * 0.2)
        for r in range(n)
        for a in range(n)
        for b in range(n)
    ]
    return PolynomialSystem(n, F1, SparseCoupling(n, 2, entries))


class TestApplyCarleman:
    def test_level_one_is_f1_action(self, quad_system):
        op = CarlemanOperator(quad_system, 1)
        y = BlockVector.from_state(np.array([1.0, -2.0]), 1)
        out = op.apply(y)
        assert np.allclose(out.block(1), quad_system.F1 @ np.array([1.0, -2.0]))

    def test_matches_dense_generator_n2_N3(self, quad_system, rng):
        A = dense_generator(quad_system, 3)
        assert A.shape == (14, 14)
        op = CarlemanOperator(quad_system, 3)
        y = BlockVector.zeros(2, 3)
        y.data[:] = rng.standard_normal(14)
        out = op.apply(y)
        assert np.abs(out.data - A @ y.data).max() <= 1e-12 * max(np.abs(A @ y.data).max(), 1.0)

    def test_cubic_transfer_levels(self, rng):
        # degree-3 coupling feeds level j from j+2; top levels get none
        n = 2
        entries = [(0, (0, 0, 0), 0.5), (1, (1, 0, 1), -0.25)]
        system = PolynomialSystem(n, -np.eye(n), SparseCoupling(n, 3, entries))
        A = dense_generator(system, 4)
        op = CarlemanOperator(system, 4)
        y = BlockVector.zeros(n, 4)
        y.data[:] = rng.standard_normal(y.total_length)
        assert np.allclose(op.apply(y).data, A @ y.data, atol=1e-12)

    def test_function_form_matches_method(self, quad_system, rng):
        op = CarlemanOperator(quad_system, 2)
        y = BlockVector.zeros(2, 2)
        y.data[:] = rng.standard_normal(6)
        assert np.allclose(apply_carleman(op, y).data, op.apply(y).data)


class TestIntegrateLifted:
    def test_pure_decay_exact(self):
        system = PolynomialSystem.linear(np.diag([-1.0]))
        traj = integrate_lifted(CarlemanOperator(system, 3), np.array([1.0]), 1.0, dt=1e-3)
        assert abs(traj.final_state[0] - np.exp(-1.0)) < 1e-10

    def test_bernoulli_truncation_level_6(self):
        system, x0 = build_bernoulli()
        traj = integrate_lifted(CarlemanOperator(system, 6), x0, 2.0, dt=1e-3)
        assert abs(traj.final_state[0] - bernoulli_exact(2.0)) < 1e-5

    def test_linear_system_matches_expm(self, rng):
        from scipy.linalg import expm

        F1 = np.array([[-1.0, 0.7], [-0.2, -1.5]])
        system = PolynomialSystem.linear(F1)
        x0 = rng.standard_normal(2) * 0.5
        for N in (2, 4):
            A = dense_generator(system, N)
            y0 = np.concatenate([lift(x0, j) for j in range(1, N + 1)])
            expected = expm(A * 0.7) @ y0
            traj = integrate_lifted(CarlemanOperator(system, N), x0, 0.7, dt=1e-4)
            assert np.abs(traj.final_state - expected[:2]).max() < 1e-8

    def test_divergence_guard_trips_with_time(self):
        system = PolynomialSystem.linear(np.array([[40.0]]))
        with pytest.raises(UnstableStepError) as exc:
            integrate_lifted(CarlemanOperator(system, 1), np.array([1.0]), 2.0, dt=0.02)
        assert 0.0 < exc.value.time <= 2.0

    def test_sample_stride_and_endpoints(self):
        system = PolynomialSystem.linear(np.diag([-1.0]))
        traj = integrate_lifted(
            CarlemanOperator(system, 2), np.array([1.0]), 0.5, dt=1e-3, stride=100
        )
        assert traj.times[0] == 0.0
        assert traj.times[-1] == pytest.approx(0.5)
        assert np.all(np.diff(traj.times) > 0)


class TestIntegrateReference:
    def test_bernoulli_against_closed_form(self):
        system, x0 = build_bernoulli()
        traj = integrate_reference(system, x0, 2.0, dt=1e-3)
        assert abs(traj.final_state[0] - bernoulli_exact(2.0)) < 1e-8

    def test_rk4_order_by_dt_halving(self):
        system, x0 = build_bernoulli()
        errs = []
        for dt in (0.08, 0.04):
            traj = integrate_reference(system, x0, 2.0, dt=dt)
            errs.append(abs(traj.final_state[0] - bernoulli_exact(2.0)))
        ratio = errs[0] / errs[1]
        assert 12.0 <= ratio <= 20.0

    def test_final_time_landing(self):
        system, x0 = build_bernoulli()
        traj = integrate_reference(system, x0, 0.35, dt=0.1)
        assert traj.times[-1] == pytest.approx(0.35, abs=1e-12)


class TestTruncationError:
    def test_zero_coupling_error_at_rounding(self):
        system = PolynomialSystem(2, np.diag([-1.0, -0.5]), SparseCoupling.empty(2))
        res = truncation_error(system, np.array([0.3, -0.4]), 3, 1.0, dt=1e-3)
        assert res.final_error <= 1e-12
        assert res.sup_error <= 1e-12

    def test_mu_is_reference_sup_l1(self):
        system, x0 = build_bernoulli()  # |x| decays monotonically from 0.5
        res = truncation_error(system, x0, 3, 1.0, dt=1e-3)
        assert res.mu == pytest.approx(0.5, abs=1e-12)

    def test_sup_dominates_final(self, quad_system):
        x0 = np.array([0.4, -0.2])
        res = truncation_error(quad_system, x0, 3, 1.5, dt=1e-3)
        assert res.sup_error >= res.final_error > 0

    def test_error_decreases_with_level(self):
        system, x0 = build_bernoulli()
        errs = [
            truncation_error(system, x0, N, 2.0, dt=1e-2).final_error
            for N in (2, 3, 4)
        ]
        assert errs[0] > errs[1] > errs[2]

    def test_norm_selection(self, quad_system):
        x0 = np.array([0.4, -0.2])
        r1 = truncation_error(quad_system, x0, 2, 1.0, dt=1e-3, norm=1)
        rinf = truncation_error(quad_system, x0, 2, 1.0, dt=1e-3, norm="inf")
        assert r1.final_error >= rinf.final_error  # l1 >= linf always


class TestStepSize:
    def test_scales_inversely_with_level_and_radius(self):
        F1 = np.diag([-4.0, -1.0])
        assert default_step_size(F1, 4) == pytest.approx(0.9 * 2.5 / (4 * 4.0))

    def test_zero_matrix_fallback(self):
        assert default_step_size(np.zeros((2, 2)), 3) == 0.1


class TestTrajectoryRecord:
    def test_rejects_nonincreasing_times(self):
        from carleman.dynamics import TrajectoryRecord

        with pytest.raises(ValueError):
            TrajectoryRecord(
                times=np.array([0.0, 0.0]),
                states=np.zeros((2, 1)),
                dt=0.1,
                method="rk4-reference",
            )
