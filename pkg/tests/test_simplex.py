import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from votepower import (
    InvalidArgumentsError,
    InvalidDimensionError,
    RandomSeed,
    as_weight_vector,
    order_descending,
    renyi_partial_sums,
    sample_uniform_simplex,
    sample_uniform_simplex_batch,
)

SUM_TOL = 1e-12


class TestWeightVectorValidation:
    def test_accepts_simplex_point(self):
        w = as_weight_vector([0.5, 0.3, 0.2])
        assert w.tolist() == [0.5, 0.3, 0.2]
        assert not w.flags.writeable

    def test_rejects_bad_sum(self):
        with pytest.raises(InvalidArgumentsError):
            as_weight_vector([0.5, 0.3])

    def test_rejects_negative(self):
        with pytest.raises(InvalidArgumentsError):
            as_weight_vector([1.2, -0.2])

    def test_rejects_empty(self):
        with pytest.raises(InvalidDimensionError):
            as_weight_vector([])

    def test_normalize(self):
        w = as_weight_vector([2, 3, 5], normalize=True)
        assert math.fsum(w.tolist()) == pytest.approx(1.0, abs=SUM_TOL)


class TestSampling:
    def test_single_player_is_point(self):
        assert sample_uniform_simplex(1, 123).tolist() == [1.0]

    def test_zero_players_rejected(self):
        with pytest.raises(InvalidDimensionError):
            sample_uniform_simplex(0, 1)

    def test_rows_are_valid_weight_vectors(self):
        batch = sample_uniform_simplex_batch(7, 5000, RandomSeed(11, 2))
        assert np.all(batch >= 0)
        sums = batch.sum(axis=1)
        assert np.max(np.abs(sums - 1.0)) <= SUM_TOL

    def test_determinism_and_stream_independence(self):
        a = sample_uniform_simplex_batch(4, 100, RandomSeed(9, 1))
        b = sample_uniform_simplex_batch(4, 100, RandomSeed(9, 1))
        c = sample_uniform_simplex_batch(4, 100, RandomSeed(9, 2))
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_single_equals_batch_head(self):
        seed = RandomSeed(77, 3)
        assert np.array_equal(
            sample_uniform_simplex(5, seed), sample_uniform_simplex_batch(5, 4, seed)[0]
        )

    def test_coordinate_means(self):
        # Symmetry: each coordinate has mean 1/n.
        batch = sample_uniform_simplex_batch(3, 10 ** 5, RandomSeed(2024))
        se = batch.std(axis=0, ddof=1) / math.sqrt(batch.shape[0])
        assert np.all(np.abs(batch.mean(axis=0) - 1.0 / 3.0) <= 3.0 * se)

    def test_sum_of_squares_mean(self):
        # E(sum W^2) = 2/(n+1) = 2/5 for four players.
        batch = sample_uniform_simplex_batch(4, 10 ** 5, RandomSeed(31))
        ssq = (batch * batch).sum(axis=1)
        se = ssq.std(ddof=1) / math.sqrt(ssq.size)
        assert abs(ssq.mean() - 0.4) <= 3.0 * se

    def test_substream_guard(self):
        with pytest.raises(InvalidArgumentsError):
            RandomSeed(0, 1 << 40).substream(0)
        with pytest.raises(InvalidArgumentsError):
            RandomSeed(0, 0).substream(1 << 32)


class TestOrdering:
    def test_spec_permutation(self):
        ow = order_descending([0.2, 0.5, 0.3])
        assert ow.weights.tolist() == [0.5, 0.3, 0.2]
        assert ow.permutation.tolist() == [1, 2, 0]

    def test_sorted_input_identity(self):
        ow = order_descending([0.5, 0.3, 0.2])
        assert ow.permutation.tolist() == [0, 1, 2]

    def test_tie_keeps_original_order(self):
        ow = order_descending([0.25, 0.25, 0.5])
        assert ow.weights.tolist() == [0.5, 0.25, 0.25]
        assert ow.permutation.tolist() == [2, 0, 1]

    @given(st.integers(1, 12), st.integers(0, 2 ** 32 - 1))
    @settings(max_examples=60, deadline=None)
    def test_restore_is_bit_exact(self, n, seed):
        w = sample_uniform_simplex(n, RandomSeed(seed))
        ow = order_descending(w)
        assert np.all(np.diff(ow.weights) <= 0)
        assert np.array_equal(ow.restore(), w)


class TestRenyiPartialSums:
    def test_single(self):
        assert renyi_partial_sums([1.0]).tolist() == [1.0]

    def test_two_players(self):
        out = renyi_partial_sums([0.6, 0.4])
        assert out == pytest.approx([0.8, 0.2], abs=1e-15)

    @given(st.integers(1, 10), st.integers(0, 2 ** 32 - 1))
    @settings(max_examples=60, deadline=None)
    def test_monotone_and_normalized(self, n, seed):
        out = renyi_partial_sums(sample_uniform_simplex(n, RandomSeed(seed)))
        assert np.all(np.diff(out) <= 0)
        assert abs(math.fsum(out.tolist()) - 1.0) <= SUM_TOL

    def test_matches_order_statistics_in_distribution(self):
        # The transformed vector and the sorted vector must be statistically
        # indistinguishable; quick two-sample KS check at rank 1 for n = 4.
        from scipy.stats import ks_2samp

        a = sample_uniform_simplex_batch(4, 20000, RandomSeed(5, 10))
        b = sample_uniform_simplex_batch(4, 20000, RandomSeed(5, 11))
        ordered = np.sort(a, axis=1)[:, ::-1][:, 0]
        partial = np.array([renyi_partial_sums(row)[0] for row in b])
        assert ks_2samp(ordered, partial).pvalue > 0.01
