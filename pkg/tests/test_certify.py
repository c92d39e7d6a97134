import math
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import gaussian
from oracles import rip_per_support
from phaseless.certify import (
    half,
    io_certificate,
    lemma31_check,
    mixed_nsp_check,
    nsp_constant,
    phaseless_io_condition_estimate,
    rip_constant,
    snsp_constant,
    snsp_constant_naive,
    srip_bounds,
    srip_bounds_naive,
    stability_certificate,
    witness_ratio,
)
from phaseless.errors import CapacityError, InputError

seeds = st.integers(0, 2**32 - 1)


class TestRip:
    @pytest.mark.parametrize("n,k", [(3, 1), (5, 2), (6, 6)])
    def test_identity(self, n, k):
        r = rip_constant(np.eye(n), k)
        assert r.delta == 0 and r.valid

    def test_scalar(self):
        r = rip_constant(np.array([[2.0]]), 1)
        assert (r.lower, r.upper, r.delta, r.valid) == (4.0, 4.0, 3.0, False)

    def test_per_support_oracle(self, rng):
        for _ in range(5):
            A = rng.standard_normal((6, 8))
            r = rip_constant(A, 2)
            lo, hi, d = rip_per_support(A, 2)
            assert abs(r.lower - lo) < 1e-10 and abs(r.upper - hi) < 1e-10 and abs(r.delta - d) < 1e-10
            S = list(r.witness_support)
            ev = np.linalg.eigvalsh(A[:, S].T @ A[:, S])
            assert max(1 - ev[0], ev[-1] - 1) == pytest.approx(r.delta)

    @given(seeds)
    def test_monotone_in_k(self, seed):
        A = gaussian(np.random.default_rng(seed), 5, 6)
        deltas = [rip_constant(A, k).delta for k in range(1, 7)]
        assert all(a <= b + 1e-12 for a, b in zip(deltas, deltas[1:]))

    def test_errors(self):
        with pytest.raises(InputError):
            rip_constant(np.eye(3), 0)
        with pytest.raises(CapacityError):
            rip_constant(np.zeros((2, 40)), 20, cap=1000)


class TestSrip:
    def test_duplicated_coordinates(self):
        A = np.array([[1.0, 0], [0, 1], [1, 0], [0, 1]])
        r = srip_bounds(A, 1)
        assert r.theta_minus == 0 and r.theta_plus == 2 and not r.valid
        support, rows = r.witness
        assert support == (1,) and rows == (0, 2)

    def test_scaled_stacked_identity(self):
        # I = {rows 0, 2} holds only copies of e_1, so e_2 is annihilated
        A = np.vstack([np.eye(2), np.eye(2)]) / np.sqrt(2)
        r = srip_bounds(A, 1)
        n = srip_bounds_naive(A, 1)
        assert r.theta_minus == pytest.approx(0.0, abs=1e-15) and n.theta_minus == pytest.approx(0.0, abs=1e-15)
        assert r.theta_plus == pytest.approx(1.0) and n.theta_plus == pytest.approx(1.0)

    def test_hand_enumeration_of_subsets(self):
        A = np.vstack([np.eye(2), np.eye(2)]) / np.sqrt(2)
        tm = np.inf
        count = 0
        for size in (2, 3, 4):
            for I in combinations(range(4), size):
                count += 1
                for j in range(2):
                    tm = min(tm, float(np.sum(A[list(I), j] ** 2)))
        assert count == 11
        assert srip_bounds_naive(A, 1).theta_minus == pytest.approx(tm)

    @given(seeds)
    @settings(max_examples=20)
    def test_reduction_matches_naive(self, seed):
        rng = np.random.default_rng(seed)
        m, n = int(rng.integers(2, 9)), int(rng.integers(1, 7))
        k = int(rng.integers(1, min(2, n) + 1))
        A = gaussian(rng, m, n)
        r, o = srip_bounds(A, k), srip_bounds_naive(A, k)
        assert abs(r.theta_minus - o.theta_minus) < 1e-10
        assert abs(r.theta_plus - o.theta_plus) < 1e-10
        assert r.theta_minus <= rip_constant(A, k).lower + 1e-12
        assert r.theta_plus == pytest.approx(rip_constant(A, k).upper, abs=1e-12)
        assert r.theta_minus <= r.theta_plus

    def test_witness_attains_theta_minus(self, rng):
        A = gaussian(rng, 7, 5)
        r = srip_bounds(A, 2)
        x = r.witness_vector
        rows = list(r.witness[1])
        assert len(rows) == half(7) == 4
        assert np.count_nonzero(x) <= 2 and np.linalg.norm(x) == pytest.approx(1.0)
        assert np.sum((A[rows] @ x) ** 2) == pytest.approx(r.theta_minus, abs=1e-12)

    def test_naive_cap(self):
        with pytest.raises(CapacityError):
            srip_bounds_naive(np.zeros((13, 2)) + 1.0, 1)


class TestLemma31:
    def test_trivial_pairs(self, rng):
        A = gaussian(rng, 8, 4)
        x = rng.standard_normal(4)
        assert np.sum((np.abs(A @ x) - np.abs(A @ x)) ** 2) == 0
        assert min(np.sum((x - (-x)) ** 2), np.sum((x + (-x)) ** 2)) == 0

    def test_no_violations_with_certified_theta(self, rng):
        A = gaussian(rng, 12, 3)
        rep = srip_bounds(A, 2)
        out = lemma31_check(A, 1, rep.theta_minus, trials=500, seed=1)
        assert out["violations"] == 0 and out["worst_margin"] >= -1e-10

    def test_detects_overstated_theta(self, rng):
        A = gaussian(rng, 12, 3)
        out = lemma31_check(A, 1, 50.0, trials=200, seed=1)
        assert out["violations"] > 0


class TestNsp:
    def test_golden_one_by_two(self):
        r = nsp_constant(np.array([[1.0, 1.0]]), 1)
        assert r.constant == pytest.approx(2.0, abs=1e-9)
        w = r.witness / np.abs(r.witness).max()
        assert np.allclose(np.abs(w), [1, 1]) and w[0] == -w[1]

    def test_trivial_null_space(self, rng):
        r = nsp_constant(rng.standard_normal((3, 3)), 1)
        assert r.constant == 0 and r.vacuous

    def test_sparse_null_vector(self):
        r = nsp_constant(np.array([[1.0, 0.0]]), 1)
        assert math.isinf(r.constant)
        assert np.count_nonzero(r.witness) == 1

    def test_cap(self):
        with pytest.raises(CapacityError):
            nsp_constant(np.ones((1, 13)), 1)

    @given(seeds)
    @settings(max_examples=15)
    def test_witness_ratio_and_sampling_lower_bound(self, seed):
        rng = np.random.default_rng(seed)
        A = rng.standard_normal((2, 5))
        r = nsp_constant(A, 1)
        assert r.constant >= 1.0
        assert witness_ratio(r.witness, 1) == pytest.approx(r.constant, rel=1e-9)
        Z = np.linalg.svd(A)[2][2:].T
        for _ in range(200):
            eta = Z @ rng.standard_normal(Z.shape[1])
            assert witness_ratio(eta, 1) <= r.constant * (1 + 1e-9)


class TestSnsp:
    def test_two_rows_reduce_to_single_rows(self, rng):
        A = rng.standard_normal((2, 3))
        r = snsp_constant(A, 1)
        assert r.constant == pytest.approx(max(nsp_constant(A[[0]], 1).constant,
                                               nsp_constant(A[[1]], 1).constant))

    def test_duplicated_rows(self, rng):
        row = rng.standard_normal((1, 3))
        A = np.vstack([row, row])
        assert snsp_constant(A, 1).constant == pytest.approx(nsp_constant(A, 1).constant)

    def test_matches_naive(self, rng):
        for _ in range(3):
            A = rng.standard_normal((6, 4))
            a, b = snsp_constant(A, 1), snsp_constant_naive(A, 1)
            assert a.constant == pytest.approx(b.constant, rel=1e-9)
            assert witness_ratio(a.witness, 1) == pytest.approx(a.constant, rel=1e-9)


class TestPhaselessIo:
    def test_vacuous_when_halves_injective(self, rng):
        A = np.vstack([np.eye(2)] * 4)
        out = phaseless_io_condition_estimate(A, 1, budget=5, seed=0)
        # random splits may leave one half rank deficient; force injective halves
        A = rng.standard_normal((40, 2))
        out = phaseless_io_condition_estimate(A, 1, budget=5, seed=0)
        assert out["vacuous"] and out["estimate"] == 0 and not out["exact"]

    def test_scale_invariance(self, rng):
        from phaseless.certify import _io_ratio
        e1, e2 = rng.standard_normal(5), rng.standard_normal(5)
        assert _io_ratio(3 * e1, 3 * e2, 2) == pytest.approx(_io_ratio(e1, e2, 2))

    def test_below_snsp_chain(self, rng):
        A = rng.standard_normal((6, 4))
        est = phaseless_io_condition_estimate(A, 1, budget=30, seed=2)["estimate"]
        assert est <= 2 * snsp_constant(A, 2).constant + 1e-6

    def test_budget(self):
        with pytest.raises(InputError):
            phaseless_io_condition_estimate(np.eye(2), 1, budget=0)


class TestMixedNsp:
    def test_exponent_collapse_and_exact_cross_check(self, rng):
        A = rng.standard_normal((4, 5))
        exact = snsp_constant(A, 1).constant
        out = mixed_nsp_check(A, 1, 1.0, 1.0, C=exact * (1 + 1e-9), budget=30, seed=0)
        assert out["exponent"] == 0
        assert out["violations"] == 0 and out["worst_ratio"] <= exact * (1 + 1e-9)

    def test_sparse_null_vector_violates(self):
        A = np.array([[1.0, 0.0, 0.0], [1.0, 0.0, 0.0]])
        out = mixed_nsp_check(A, 1, 2.0, 1.0, C=1e6, budget=5, seed=0)
        assert out["violations"] > 0 and math.isinf(out["worst_ratio"])

    def test_range(self):
        with pytest.raises(InputError):
            mixed_nsp_check(np.eye(2), 1, 1.0, 2.0, C=1.0)


class TestTheoremCertificates:
    def test_certifiable_when_halves_injective(self, rng):
        A = gaussian(rng, 16, 2)
        stab = stability_certificate(A, 1)
        io = io_certificate(A, 1)
        assert stab and io
        assert all(c.order == 2 and math.isinf(c.t_max) for c in stab + io)

    def test_scaled_rows_not_certified(self, rng):
        A = 10 * gaussian(rng, 16, 2)
        assert stability_certificate(A, 1) == [] and io_certificate(A, 1) == []
