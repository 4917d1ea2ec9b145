"""Per-label confusion-matrix metrics and ROC-AUC."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata


@dataclass(frozen=True)
class LabelMetrics:
    """Accuracy/sensitivity/specificity/AUC for one label, rates in [0, 1].

    Sensitivity and AUC can be undefined (no positives, or a single class);
    they are then reported as 0.0 with the matching flag cleared.
    """

    accuracy: float
    sensitivity: float
    specificity: float
    auc: float
    sensitivity_defined: bool = True
    specificity_defined: bool = True
    auc_defined: bool = True


def confusion_counts(
    y_true: np.ndarray, y_pred: np.ndarray
) -> tuple[int, int, int, int]:
    """(TP, TN, FP, FN) for one binary label."""
    y_true = np.asarray(y_true).astype(bool)
    y_pred = np.asarray(y_pred).astype(bool)
    tp = int(np.sum(y_true & y_pred))
    tn = int(np.sum(~y_true & ~y_pred))
    fp = int(np.sum(~y_true & y_pred))
    fn = int(np.sum(y_true & ~y_pred))
    return tp, tn, fp, fn


def roc_auc(scores, labels) -> float:
    """Probability a random positive outranks a random negative; ties count 0.5.

    Computed via the rank-sum identity, which matches the pairwise definition
    exactly (average ranks handle ties).
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels).astype(bool)
    n_pos = int(labels.sum())
    n_neg = int(len(labels) - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise ValueError("roc_auc needs at least one positive and one negative")
    ranks = rankdata(scores)
    rank_sum = ranks[labels].sum()
    return float((rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def roc_curve_points(scores, labels) -> tuple[np.ndarray, np.ndarray]:
    """(FPR, TPR) at every distinct score threshold, endpoints included."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels).astype(bool)
    n_pos = int(labels.sum())
    n_neg = int(len(labels) - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise ValueError("roc curve needs both classes")
    order = np.argsort(-scores, kind="stable")
    sorted_scores = scores[order]
    sorted_labels = labels[order]
    tpr = [0.0]
    fpr = [0.0]
    tp = fp = 0
    i = 0
    n = len(scores)
    while i < n:
        j = i
        while j < n and sorted_scores[j] == sorted_scores[i]:
            tp += bool(sorted_labels[j])
            fp += not sorted_labels[j]
            j += 1
        tpr.append(tp / n_pos)
        fpr.append(fp / n_neg)
        i = j
    return np.array(fpr), np.array(tpr)


def roc_auc_trapezoid(scores, labels) -> float:
    """Trapezoidal area under the ROC curve; cross-checks roc_auc."""
    fpr, tpr = roc_curve_points(scores, labels)
    return float(np.trapezoid(tpr, fpr))


def label_metrics(
    y_true: np.ndarray, y_pred: np.ndarray, scores: np.ndarray | None = None
) -> LabelMetrics:
    """Metrics for one label from thresholded predictions and raw scores."""
    tp, tn, fp, fn = confusion_counts(y_true, y_pred)
    total = tp + tn + fp + fn
    accuracy = (tp + tn) / total if total else 0.0
    sen_defined = (tp + fn) > 0
    sensitivity = tp / (tp + fn) if sen_defined else 0.0
    spe_defined = (tn + fp) > 0
    specificity = tn / (tn + fp) if spe_defined else 0.0
    auc_defined = sen_defined and spe_defined and scores is not None
    auc = roc_auc(scores, y_true) if auc_defined else 0.0
    return LabelMetrics(
        accuracy=accuracy,
        sensitivity=sensitivity,
        specificity=specificity,
        auc=auc,
        sensitivity_defined=sen_defined,
        specificity_defined=spe_defined,
        auc_defined=auc_defined,
    )
