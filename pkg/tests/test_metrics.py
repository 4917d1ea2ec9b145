"""Metric oracles: confusion counts, ROC-AUC vs pairwise brute force."""

import numpy as np
import pytest

from labelloop import (
    confusion_counts,
    label_metrics,
    roc_auc,
    roc_auc_trapezoid,
    roc_curve_points,
)


def pairwise_auc(scores, labels):
    """Brute-force over all positive/negative pairs; ties count half."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels).astype(bool)
    pos = scores[labels]
    neg = scores[~labels]
    diff = pos[:, None] - neg[None, :]
    return float((np.sum(diff > 0) + 0.5 * np.sum(diff == 0)) / diff.size)


class TestRocAuc:
    def test_spot_value(self):
        assert roc_auc([0.1, 0.4, 0.35, 0.8], [0, 0, 1, 1]) == pytest.approx(0.75)

    def test_matches_pairwise_brute_force(self):
        rng = np.random.default_rng(0)
        for trial in range(100):
            n = int(rng.integers(2, 501))
            labels = rng.integers(0, 2, size=n)
            if labels.sum() == 0:
                labels[0] = 1
            if labels.sum() == n:
                labels[0] = 0
            # quantized scores force ties into play
            scores = np.round(rng.random(n), 2)
            assert roc_auc(scores, labels) == pytest.approx(
                pairwise_auc(scores, labels), abs=1e-9
            )

    def test_trapezoid_cross_check(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            n = int(rng.integers(4, 200))
            labels = rng.integers(0, 2, size=n)
            labels[0], labels[1] = 0, 1
            scores = np.round(rng.random(n), 2)
            assert roc_auc(scores, labels) == pytest.approx(
                roc_auc_trapezoid(scores, labels), abs=1e-12
            )

    def test_perfect_and_inverted(self):
        assert roc_auc([0.1, 0.9], [0, 1]) == 1.0
        assert roc_auc([0.9, 0.1], [0, 1]) == 0.0

    def test_all_ties_is_half(self):
        assert roc_auc([0.5, 0.5, 0.5], [0, 1, 1]) == pytest.approx(0.5)

    def test_single_class_rejected(self):
        with pytest.raises(ValueError):
            roc_auc([0.1, 0.2], [1, 1])

    def test_curve_endpoints(self):
        fpr, tpr = roc_curve_points([0.2, 0.8, 0.5], [0, 1, 1])
        assert fpr[0] == tpr[0] == 0.0
        assert fpr[-1] == tpr[-1] == 1.0


class TestConfusion:
    def test_counts(self):
        y_true = [1, 1, 1, 1, 0, 0, 0, 0, 0, 0]
        y_pred = [1, 1, 1, 0, 1, 0, 0, 0, 0, 0]
        assert confusion_counts(y_true, y_pred) == (3, 5, 1, 1)

    def test_worked_metrics(self):
        # TP=3, FN=1, TN=5, FP=1
        y_true = [1, 1, 1, 1, 0, 0, 0, 0, 0, 0]
        y_pred = [1, 1, 1, 0, 1, 0, 0, 0, 0, 0]
        m = label_metrics(np.array(y_true), np.array(y_pred))
        assert m.sensitivity == pytest.approx(0.75)
        assert m.specificity == pytest.approx(5 / 6, abs=1e-6)
        assert m.accuracy == pytest.approx(0.80)

    def test_accuracy_identity(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            n = int(rng.integers(1, 100))
            y_true = rng.integers(0, 2, size=n)
            y_pred = rng.integers(0, 2, size=n)
            tp, tn, fp, fn = confusion_counts(y_true, y_pred)
            m = label_metrics(y_true, y_pred)
            assert m.accuracy * n == pytest.approx(tp + tn)

    def test_undefined_flags(self):
        no_pos = label_metrics(np.zeros(4), np.zeros(4))
        assert not no_pos.sensitivity_defined and no_pos.sensitivity == 0.0
        assert not no_pos.auc_defined
        no_neg = label_metrics(np.ones(4), np.ones(4))
        assert not no_neg.specificity_defined and no_neg.specificity == 0.0

    def test_auc_included_with_scores(self):
        m = label_metrics(
            np.array([0, 0, 1, 1]),
            np.array([0, 1, 0, 1]),
            scores=np.array([0.1, 0.4, 0.35, 0.8]),
        )
        assert m.auc_defined
        assert m.auc == pytest.approx(0.75)
