"""Evaluation metrics for held-out data.

auc is computed from midranks (the Mann-Whitney statistic), so ties get
average rank and any strictly increasing transform of the scores leaves it
unchanged. deviance is the mean logistic risk of link-scale scores.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .losses import stable_log1pexp


@dataclass
class EvalOutcome:
    name: str
    value: float
    n: int


def _pair(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise DataError("metric inputs must be 1-d arrays of equal length")
    if a.size == 0:
        raise DataError("metric inputs are empty")
    return a, b


def mse(predicted, observed):
    """Mean squared error."""
    predicted, observed = _pair(predicted, observed)
    d = predicted - observed
    return float(d @ d / d.size)


def accuracy(predicted_class, observed):
    """Fraction of exact matches between predicted and observed classes."""
    predicted_class, observed = _pair(predicted_class, observed)
    return float(np.mean(predicted_class == observed))


def auc(scores, labels):
    """Area under the ROC curve via midranks.

    labels must contain both classes (0 and 1); scores may live on any
    scale that orders the predictions.
    """
    scores, labels = _pair(scores, labels)
    if not np.all((labels == 0.0) | (labels == 1.0)):
        raise DataError("auc labels must be 0/1")
    n_pos = int(labels.sum())
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DataError("auc needs at least one positive and one negative")
    order = np.argsort(scores, kind="mergesort")
    _, inverse, counts = np.unique(scores[order], return_inverse=True,
                                   return_counts=True)
    starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
    midranks_sorted = starts[inverse] + (counts[inverse] + 1) / 2.0
    midranks = np.empty(scores.size)
    midranks[order] = midranks_sorted
    rank_sum = float(midranks[labels == 1.0].sum())
    u = rank_sum - n_pos * (n_pos + 1) / 2.0
    return u / (n_pos * n_neg)


def deviance(link_scores, labels):
    """Mean logistic risk of link-scale scores against 0/1 labels."""
    link_scores, labels = _pair(link_scores, labels)
    if not np.all((labels == 0.0) | (labels == 1.0)):
        raise DataError("deviance labels must be 0/1")
    vals = stable_log1pexp(link_scores) - labels * link_scores
    return float(np.mean(vals))
