import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mlmmsb import (
    ConnectivityStack,
    EmptyNetworkError,
    MembershipMatrix,
    ModelSelectionError,
    MultiLayerNetwork,
    UnsupportedKError,
    classify_nodes,
    estimate_k,
    membership_errors,
    q_fmean,
    q_fsum,
    sample_mlmmsb,
)
from mlmmsb.errors import EmptyLayerWarning
from mlmmsb.metrics import HIGHLY_MIXED, HIGHLY_PURE, NEUTRAL


def pure(labels, K):
    rows = np.zeros((len(labels), K))
    rows[np.arange(len(labels)), labels] = 1
    return MembershipMatrix(rows=rows)


def two_triangles():
    a = np.zeros((6, 6))
    for i, j in [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]:
        a[i, j] = a[j, i] = 1
    return MultiLayerNetwork(layers=a[None, :, :])


def newman_girvan(adj, labels):
    # independent direct implementation over hard communities
    degrees = adj.sum(axis=1)
    m = degrees.sum()
    q = 0.0
    for c in set(labels):
        members = [i for i, l in enumerate(labels) if l == c]
        e_c = adj[np.ix_(members, members)].sum() / m
        a_c = degrees[members].sum() / m
        q += e_c - a_c**2
    return q


class TestPermutationErrors:
    def test_exact_match_is_zero(self):
        pi = pure([0, 1, 2, 0], 3)
        report = membership_errors(pi, pi)
        assert report.hamming == 0
        assert report.relative == 0

    def test_column_swap_is_zero(self):
        pi = pure([0, 1, 0], 2)
        swapped = MembershipMatrix(rows=pi.rows[:, ::-1])
        report = membership_errors(swapped, pi)
        assert report.hamming == pytest.approx(0, abs=1e-15)
        assert report.relative == pytest.approx(0, abs=1e-15)

    def test_hand_example_k2(self):
        pi_true = MembershipMatrix(rows=np.eye(2))
        pi_hat = MembershipMatrix(rows=np.array([[0.8, 0.2], [0.0, 1.0]]))
        report = membership_errors(pi_hat, pi_true)
        assert report.hamming == pytest.approx(0.2)
        assert report.relative == pytest.approx(math.sqrt(0.08) / math.sqrt(2))
        assert report.best_permutation == (0, 1)

    def test_pure_case_is_twice_misclustered_fraction(self):
        pi_true = pure([0, 0, 1, 1], 2)
        pi_hat = pure([0, 1, 1, 1], 2)  # one of four nodes wrong
        assert membership_errors(pi_hat, pi_true).hamming == pytest.approx(2 * 0.25)

    def test_k_above_limit_rejected(self):
        pi = MembershipMatrix(rows=np.eye(9))
        with pytest.raises(UnsupportedKError):
            membership_errors(pi, pi)

    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(0, 10_000), K=st.integers(2, 4))
    def test_invariant_under_column_shuffles(self, seed, K):
        rng = np.random.default_rng(seed)
        t = MembershipMatrix(rows=rng.dirichlet(np.ones(K), size=10))
        h = MembershipMatrix(rows=rng.dirichlet(np.ones(K), size=10))
        base = membership_errors(h, t)
        perm = tuple(rng.permutation(K))
        shuffled = MembershipMatrix(rows=h.rows[:, perm])
        report = membership_errors(shuffled, t)
        assert report.hamming == pytest.approx(base.hamming, abs=1e-12)
        assert report.relative == pytest.approx(base.relative, abs=1e-12)

    def test_invariant_under_row_permutation(self):
        rng = np.random.default_rng(7)
        t = MembershipMatrix(rows=rng.dirichlet(np.ones(3), size=8))
        h = MembershipMatrix(rows=rng.dirichlet(np.ones(3), size=8))
        perm = rng.permutation(8)
        base = membership_errors(h, t)
        moved = membership_errors(
            MembershipMatrix(rows=h.rows[perm]), MembershipMatrix(rows=t.rows[perm])
        )
        assert moved.hamming == pytest.approx(base.hamming, abs=1e-12)


class TestModularity:
    def test_k1_is_exactly_zero(self):
        net = two_triangles()
        ones = MembershipMatrix(rows=np.ones((6, 1)))
        assert q_fsum(net, ones) == pytest.approx(0, abs=1e-15)
        assert q_fmean(net, ones) == pytest.approx(0, abs=1e-15)

    def test_uniform_membership_is_exactly_zero(self):
        net = two_triangles()
        uniform = MembershipMatrix(rows=np.full((6, 3), 1 / 3))
        assert q_fsum(net, uniform) == pytest.approx(0, abs=1e-15)

    def test_two_triangles_pure_partition(self):
        net = two_triangles()
        pi = pure([0, 0, 0, 1, 1, 1], 2)
        assert q_fsum(net, pi) == pytest.approx(0.5, abs=1e-12)
        assert q_fmean(net, pi) == pytest.approx(0.5, abs=1e-12)

    def test_identical_layers_average_to_single_value(self):
        a = two_triangles().layers[0]
        net = MultiLayerNetwork(layers=np.stack([a, a]))
        pi = pure([0, 0, 0, 1, 1, 1], 2)
        assert q_fmean(net, pi) == pytest.approx(0.5, abs=1e-12)

    def test_empty_layer_skipped_with_warning(self):
        a = two_triangles().layers[0]
        net = MultiLayerNetwork(layers=np.stack([a, np.zeros_like(a)]))
        pi = pure([0, 0, 0, 1, 1, 1], 2)
        with pytest.warns(EmptyLayerWarning):
            assert q_fmean(net, pi) == pytest.approx(0.5, abs=1e-12)

    def test_empty_network_errors(self):
        net = MultiLayerNetwork(layers=np.zeros((1, 4, 4)))
        pi = pure([0, 0, 1, 1], 2)
        with pytest.raises(EmptyNetworkError):
            q_fsum(net, pi)
        with pytest.raises(EmptyNetworkError):
            q_fmean(net, pi)

    def test_column_permutation_invariance(self):
        net = two_triangles()
        rng = np.random.default_rng(5)
        pi = MembershipMatrix(rows=rng.dirichlet(np.ones(3), size=6))
        base = q_fsum(net, pi)
        for perm in itertools.permutations(range(3)):
            assert q_fsum(net, MembershipMatrix(rows=pi.rows[:, perm])) == pytest.approx(base)

    def test_matches_newman_girvan_for_pure_single_layer(self):
        rng = np.random.default_rng(9)
        for _ in range(10):
            n = 8
            a = np.triu((rng.random((n, n)) < 0.5).astype(float), k=1)
            a = a + a.T
            if a.sum() == 0:
                continue
            labels = list(rng.integers(0, 2, size=n))
            if len(set(labels)) < 2:
                labels[0] = 1 - labels[0]
            net = MultiLayerNetwork(layers=a[None, :, :])
            expected = newman_girvan(a, labels)
            assert q_fsum(net, pure(labels, 2)) == pytest.approx(expected, abs=1e-12)
            assert q_fmean(net, pure(labels, 2)) == pytest.approx(expected, abs=1e-12)


class TestClassifyNodes:
    def test_labels_and_home(self):
        rows = np.array([[1, 0, 0], [0.5, 0.3, 0.2], [0.7, 0.2, 0.1]])
        cls = classify_nodes(MembershipMatrix(rows=rows))
        assert cls.label == (HIGHLY_PURE, HIGHLY_MIXED, NEUTRAL)
        assert list(cls.home_community) == [0, 0, 0]

    def test_thresholds_inclusive(self):
        rows = np.array([[0.6, 0.4], [0.9, 0.1]])
        cls = classify_nodes(MembershipMatrix(rows=rows))
        assert cls.label == (HIGHLY_MIXED, HIGHLY_PURE)

    def test_balanced_columns_give_upsilon_one(self):
        rows = np.array([[1.0, 0.0], [0.0, 1.0], [0.5, 0.5], [0.5, 0.5]])
        assert classify_nodes(MembershipMatrix(rows=rows)).upsilon == pytest.approx(1.0)

    def test_fraction_sum_bounded(self):
        rng = np.random.default_rng(1)
        cls = classify_nodes(MembershipMatrix(rows=rng.dirichlet(np.ones(3), size=50)))
        assert cls.sigma_mixed + cls.sigma_pure <= 1


class TestEstimateK:
    def planted_two_block(self, n=150, L=20, rho=0.4, seed=0):
        rows = np.zeros((n, 2))
        rows[: n // 2, 0] = 1
        rows[n // 2 :, 1] = 1
        pi = MembershipMatrix(rows=rows)
        b = np.array([[0.9, 0.1], [0.1, 0.9]])
        conn = ConnectivityStack(matrices=np.stack([b] * L), rho=rho)
        return sample_mlmmsb(pi, conn, seed)

    def test_singleton_range(self):
        net = self.planted_two_block()
        selection = estimate_k(net, "spsum", [3])
        assert selection.best_k == 3
        assert 3 in selection.scores

    def test_recovers_planted_k(self):
        net = self.planted_two_block(seed=42)
        for criterion in ("FSUM", "FMEAN"):
            selection = estimate_k(net, "spsum", range(1, 6), criterion)
            assert selection.best_k == 2

    def test_all_failures_raise(self):
        net = MultiLayerNetwork(layers=np.zeros((1, 5, 5)))
        with pytest.raises(ModelSelectionError):
            estimate_k(net, "spsum", [2, 3])
