from itertools import combinations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from phaseless.errors import InputError
from phaseless.signals import (
    best_k_term,
    canonical_sign,
    in_sigma_k,
    lp_norm,
    sim_distance,
)

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


def vectors(min_size=1, max_size=8):
    return st.integers(min_size, max_size).flatmap(lambda n: arrays(float, n, elements=finite))


class TestLpNorm:
    def test_examples(self):
        assert lp_norm([3, -4], 2) == 5
        assert lp_norm([0, 0, 0], 3) == 0
        assert lp_norm([1, -2, 3], 1) == 6
        assert lp_norm([1, -7, 3], np.inf) == 7
        assert lp_norm([1, 0, 3, 0], 0) == 2

    def test_general_p_matches_direct_formula(self, rng):
        x = rng.standard_normal(7)
        assert lp_norm(x, 1.5) == pytest.approx(np.sum(np.abs(x) ** 1.5) ** (1 / 1.5), rel=1e-13)

    @pytest.mark.parametrize("bad", [[np.nan, 1.0], [np.inf], [[1.0, 2.0]], []])
    def test_rejects_bad_input(self, bad):
        with pytest.raises(InputError):
            lp_norm(bad, 2)

    def test_rejects_negative_p(self):
        with pytest.raises(InputError):
            lp_norm([1.0], -1)


class TestBestKTerm:
    def test_example(self):
        r = best_k_term([3, -1, 2, 0], 2, 1)
        assert r.value == 1
        # 0-based indices of the entries 3 and 2
        assert r.support == (0, 2)

    def test_already_sparse(self):
        assert best_k_term([0, 5, 0, -1], 2, 2).value == 0

    def test_ties_go_to_lower_index(self):
        assert best_k_term([1, -1, 1, -1], 2, 1).support == (0, 1)

    @pytest.mark.parametrize("k", [-1, 5])
    def test_k_out_of_range(self, k):
        with pytest.raises(InputError):
            best_k_term([1, 2, 3, 4], k)

    def test_q_below_one_rejected(self):
        with pytest.raises(InputError):
            best_k_term([1, 2], 1, 0.5)

    @given(vectors(1, 8), st.data(), st.sampled_from([1.0, 1.5, 2.0]))
    def test_exhaustive_support_oracle(self, x, data, q):
        n = x.size
        k = data.draw(st.integers(0, n))
        oracle = min(
            lp_norm(np.delete(x, list(S)), q) if len(S) < n else 0.0
            for S in combinations(range(n), k)
        )
        assert best_k_term(x, k, q).value == pytest.approx(oracle, rel=1e-12, abs=1e-12)

    @given(vectors(1, 8), st.data())
    def test_value_is_residual_norm_and_below_full_norm(self, x, data):
        k = data.draw(st.integers(0, x.size))
        r = best_k_term(x, k, 2)
        assert r.value == pytest.approx(lp_norm(r.residual, 2), abs=1e-12)
        assert r.value <= lp_norm(x, 2) + 1e-12
        assert len(set(r.support)) == len(r.support) == k
        top_zero = np.all(x[list(r.support)] == 0)
        assert (r.value == lp_norm(x, 2)) == top_zero or lp_norm(x, 2) == 0

    @given(vectors(2, 8), st.data())
    def test_monotone_in_k(self, x, data):
        k1 = data.draw(st.integers(0, x.size - 1))
        k2 = data.draw(st.integers(k1, x.size))
        assert best_k_term(x, k1, 1).value >= best_k_term(x, k2, 1).value - 1e-12


class TestSimDistance:
    def test_examples(self, rng):
        x = rng.standard_normal(5)
        assert sim_distance(x, -x) == 0
        assert sim_distance([1, 0], [0, 1]) == pytest.approx(np.sqrt(2))
        y = rng.standard_normal(5)
        assert sim_distance(x, y, 1) == min(np.abs(x - y).sum(), np.abs(x + y).sum())

    def test_length_mismatch(self):
        with pytest.raises(InputError):
            sim_distance([1, 2], [1, 2, 3])

    @given(vectors(3, 3), vectors(3, 3), vectors(3, 3))
    def test_pseudometric(self, x, y, z):
        d = sim_distance
        assert d(x, y) == pytest.approx(d(y, x))
        assert d(x, x) == 0 and d(x, -x) == 0
        assert d(x, z) <= d(x, y) + d(y, z) + 1e-9 * (1 + lp_norm(x) + lp_norm(y) + lp_norm(z))

    @given(vectors(1, 6))
    def test_vanishes_on_sign_flips_only(self, x):
        shifted = x.copy()
        shifted[0] += 1.0
        assert sim_distance(x, shifted) > 0


class TestCanonicalSign:
    def test_examples(self):
        assert canonical_sign([-2, 1]).tolist() == [2, -1]
        assert canonical_sign([0, 3]).tolist() == [0, 3]
        assert canonical_sign([0.0, 0.0]).tolist() == [0, 0]
        assert canonical_sign([-1e-12, -2], tol=1e-9).tolist() == [1e-12, 2]

    @given(vectors(1, 8))
    def test_idempotent_and_equivalent(self, x):
        c = canonical_sign(x)
        assert np.array_equal(canonical_sign(c), c)
        assert sim_distance(c, x) == 0


def test_in_sigma_k():
    assert in_sigma_k([0, 1, 0, 2], 2)
    assert not in_sigma_k([0, 1, 0, 2], 1)
    assert in_sigma_k([1e-12, 1.0], 1, tol=1e-9)
