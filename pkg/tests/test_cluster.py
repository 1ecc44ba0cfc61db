import numpy as np
import pytest
from hypothesis import given, strategies as st

from corrnmf import (
    LabelAssignment,
    accuracy,
    confusion_matrix,
    evaluate,
    hungarian_match,
    kmeans,
)
from corrnmf.cluster import _lloyd

from oracles import oracle_assignment


def planted_columns(seed, groups=2, per_group=12, dim=3, separation=6.0):
    rng = np.random.default_rng(seed)
    cols = []
    labels = []
    for g in range(groups):
        center = np.zeros(dim)
        center[g % dim] = separation
        cols.append(center[:, None] + rng.normal(0, 0.2, (dim, per_group)))
        labels.extend([g] * per_group)
    return np.hstack(cols), np.array(labels)


class TestKmeans:
    @pytest.mark.parametrize("seed", range(5))
    def test_recovers_planted_groups(self, seed):
        w, truth = planted_columns(seed)
        labels = kmeans(w, 2, seed=seed)
        assert accuracy(LabelAssignment(labels, truth)) == 1.0

    def test_k_equals_n_gives_singletons(self):
        rng = np.random.default_rng(0)
        w = rng.random((2, 6))
        labels = kmeans(w, 6, seed=1)
        assert len(set(labels.tolist())) == 6

    def test_same_seed_identical(self):
        w, _ = planted_columns(3, groups=3)
        a = kmeans(w, 3, seed=7)
        b = kmeans(w, 3, seed=7)
        np.testing.assert_array_equal(a, b)

    def test_k_larger_than_n_rejected(self):
        with pytest.raises(ValueError, match="exceeds"):
            kmeans(np.ones((2, 4)), 5)

    def test_non_finite_rejected(self):
        w = np.ones((2, 4))
        w[0, 0] = np.nan
        with pytest.raises(ValueError, match="non-finite"):
            kmeans(w, 2)

    @pytest.mark.parametrize("seed", range(5))
    def test_wcss_never_increases_within_run(self, seed):
        rng = np.random.default_rng(seed)
        points = rng.random((40, 4))
        _, _, trace = _lloyd(points, 5, np.random.default_rng([seed, 0]), 100)
        drops = np.diff(trace) / np.maximum(np.abs(trace[:-1]), 1e-300)
        assert (drops <= 1e-10).all()

    def test_duplicate_points_still_fill_clusters(self):
        # more clusters than distinct points exercises the empty-cluster repair
        w = np.array([[0.0, 0.0, 5.0, 5.0, 9.0], [0.0, 0.0, 5.0, 5.0, 9.0]])
        labels = kmeans(w, 4, seed=0)
        assert labels.shape == (5,)


class TestHungarianMatch:
    def test_diagonal_is_identity(self):
        mapping = hungarian_match(np.diag([5, 3, 9]))
        np.testing.assert_array_equal(mapping, [0, 1, 2])

    def test_antidiagonal_swaps(self):
        confusion = np.array([[0, 10], [10, 0]])
        mapping = hungarian_match(confusion)
        np.testing.assert_array_equal(mapping, [1, 0])
        assert confusion[np.arange(2), mapping].sum() == 20

    @pytest.mark.parametrize("seed", range(25))
    def test_matches_exhaustive_search(self, seed):
        rng = np.random.default_rng(seed)
        confusion = rng.integers(0, 30, size=(5, 5))
        mapping = hungarian_match(confusion)
        matched = int(confusion[np.arange(5), mapping].sum())
        _, best = oracle_assignment(confusion)
        assert matched == best

    def test_rejects_non_square(self):
        with pytest.raises(ValueError, match="square"):
            hungarian_match(np.ones((2, 3)))

    def test_rejects_negative_counts(self):
        with pytest.raises(ValueError, match="nonnegative"):
            hungarian_match(np.array([[1, -1], [0, 2]]))


class TestAccuracy:
    def test_perfect_prediction(self):
        assignment = LabelAssignment([0, 1, 2, 0], [0, 1, 2, 0])
        assert accuracy(assignment) == 1.0

    def test_permuted_labels_still_perfect(self):
        truth = np.array([0, 0, 1, 1, 2, 2])
        permutation = np.array([2, 0, 1])
        assignment = LabelAssignment(permutation[truth], truth)
        assert accuracy(assignment) == 1.0

    def test_half_matched_hand_case(self):
        assignment = LabelAssignment([0, 1, 0, 1], [0, 0, 1, 1])
        assert accuracy(assignment) == 0.5

    @given(st.permutations(list(range(4))), st.integers(0, 100))
    def test_relabeling_is_invariant(self, permutation, seed):
        rng = np.random.default_rng(seed)
        truth = rng.integers(0, 4, size=30)
        predicted = rng.integers(0, 4, size=30)
        base = accuracy(LabelAssignment(predicted, truth))
        relabeled = np.asarray(permutation)[predicted]
        assert accuracy(LabelAssignment(relabeled, truth)) == pytest.approx(base, abs=1e-15)

    def test_imperfect_prediction_below_one(self):
        truth = np.array([0, 0, 0, 1, 1, 1])
        predicted = np.array([0, 0, 1, 1, 1, 1])
        assert accuracy(LabelAssignment(predicted, truth)) == pytest.approx(5 / 6)

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError, match="length mismatch"):
            LabelAssignment([0, 1], [0, 1, 1])

    def test_negative_labels_rejected(self):
        with pytest.raises(ValueError, match="nonnegative"):
            LabelAssignment([0, -1], [0, 1])

    def test_report_contents(self):
        assignment = LabelAssignment([1, 1, 0, 0], [0, 0, 1, 1])
        report = evaluate(assignment)
        assert report.accuracy == 1.0
        np.testing.assert_array_equal(report.mapping, [1, 0])
        np.testing.assert_array_equal(report.confusion, [[0, 2], [2, 0]])
        payload = report.to_json_dict()
        assert payload["accuracy"] == 1.0
        assert payload["mapping"] == [1, 0]

    def test_confusion_counts(self):
        assignment = LabelAssignment([0, 0, 1], [0, 1, 1])
        np.testing.assert_array_equal(confusion_matrix(assignment), [[1, 1], [0, 1]])
