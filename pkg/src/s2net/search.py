"""Random hyperparameter search scored on held-out validation data.

Each trial draws all five penalty weights log-uniformly (base 2) from the
space, fits on the training dataset, and scores predictions on the
validation split. Trials run on independent Philox substreams spawned from
one seed, so results are reproducible bit for bit and independent of
evaluation order. A trial always consumes its five draws even for weights
pinned through space.fixed, which keeps the random sequence aligned between
a constrained search (such as the supervised baseline with gamma1 = 0) and
the full one under a shared seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .data import RawTable, replay
from .errors import DataError, NumericError
from .metrics import accuracy, auc, deviance, mse
from .model import Hyperparams, fit, predict

PARAM_NAMES = ("lambda1", "lambda2", "gamma1", "gamma2", "gamma3")
METRICS = ("mse", "deviance", "auc", "accuracy")


@dataclass(frozen=True)
class SearchSpace:
    """Log2 sampling ranges per weight, plus values pinned outside sampling."""

    lambda1: tuple = (-8.0, 1.0)
    lambda2: tuple = (-8.0, 1.0)
    gamma1: tuple = (-8.0, 1.0)
    gamma2: tuple = (-1.0, 10.0)
    gamma3: tuple = (-8.0, 1.0)
    fixed: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in PARAM_NAMES:
            lo, hi = getattr(self, name)
            if not (np.isfinite(lo) and np.isfinite(hi) and lo <= hi):
                raise DataError(f"{name} range must be a finite (lo, hi) pair")
        for name, value in self.fixed.items():
            if name not in PARAM_NAMES:
                raise DataError(f"fixed has unknown weight {name!r}")
            if not (np.isfinite(value) and value >= 0.0):
                raise DataError(f"fixed {name} must be a finite nonnegative value")


def baseline_space(space=None):
    """The supervised counterpart of a space: gamma1 pinned to 0."""
    space = space or SearchSpace()
    fixed = dict(space.fixed)
    fixed["gamma1"] = 0.0
    return SearchSpace(
        lambda1=space.lambda1, lambda2=space.lambda2, gamma1=space.gamma1,
        gamma2=space.gamma2, gamma3=space.gamma3, fixed=fixed,
    )


def sample_hyperparams(space, rng):
    """Draw one hyperparameter vector; fixed entries override their draw."""
    draws = {}
    for name in PARAM_NAMES:
        lo, hi = getattr(space, name)
        draws[name] = float(2.0 ** rng.uniform(lo, hi))
    for name, value in space.fixed.items():
        draws[name] = float(value)
    return Hyperparams(**draws)


@dataclass
class TrialRecord:
    index: int
    hyper: Hyperparams
    score: float


@dataclass
class SearchResult:
    best: Hyperparams
    best_score: float
    best_index: int
    trials: list
    metric: str

    @property
    def n_failed(self):
        return sum(1 for t in self.trials if not np.isfinite(t.score))


def default_metric(family):
    return "mse" if family == "linear" else "auc"


def _check_metric(metric, family):
    if metric not in METRICS:
        raise DataError(f"metric must be one of {METRICS}, got {metric!r}")
    if metric == "mse" and family != "linear":
        raise DataError("mse scores linear models only")
    if metric in ("auc", "accuracy", "deviance") and family != "logistic":
        raise DataError(f"{metric} scores logistic models only")


def score_model(model, x_valid, y_valid, metric):
    """Validation score, lower is better (auc and accuracy are negated)."""
    if metric == "mse":
        return mse(predict(model, x_valid, "link"), y_valid)
    if metric == "auc":
        return -auc(predict(model, x_valid, "link"), y_valid)
    if metric == "accuracy":
        return -accuracy(predict(model, x_valid, "class"), y_valid)
    return deviance(predict(model, x_valid, "link"), y_valid)


def random_search(train, valid, space=None, iterations=1000, seed=0,
                  config=None, metric=None, projection="auto"):
    """Tune by random search; returns a SearchResult.

    valid is an (x, y) pair with x either a RawTable (replayed through the
    training preprocessing) or an already-preprocessed matrix, and y on the
    raw label scale. Trials whose fit or score fails numerically count as
    +inf; ties keep the earliest trial. Every trial failing is an error.
    """
    if space is None:
        space = SearchSpace()
    if iterations < 1:
        raise DataError("iterations must be at least 1")
    metric = metric or default_metric(train.response_kind)
    _check_metric(metric, train.response_kind)

    x_valid, y_valid = valid
    if isinstance(x_valid, RawTable):
        x_valid = replay(train.preprocess, x_valid)
    else:
        x_valid = np.asarray(x_valid, dtype=float)
    y_valid = np.asarray(y_valid, dtype=float)
    if y_valid.shape != (x_valid.shape[0],):
        raise DataError("validation labels must align with validation rows")

    children = np.random.SeedSequence(seed).spawn(iterations)
    trials = []
    best_index = -1
    best_score = np.inf
    best_hp = None
    for i, child in enumerate(children):
        rng = np.random.Generator(np.random.Philox(child))
        hp = sample_hyperparams(space, rng)
        try:
            model = fit(train, hp, config=config, projection=projection)
            score = float(score_model(model, x_valid, y_valid, metric))
            if not np.isfinite(score):
                score = np.inf
        except (NumericError, np.linalg.LinAlgError):
            score = np.inf
        trials.append(TrialRecord(index=i, hyper=hp, score=score))
        if score < best_score:
            best_score = score
            best_index = i
            best_hp = hp
    if best_hp is None:
        raise NumericError(f"all {iterations} search trials failed")
    return SearchResult(
        best=best_hp, best_score=best_score, best_index=best_index,
        trials=trials, metric=metric,
    )


def trial_rows(result):
    """Per-trial records as flat dicts, ready for CSV export."""
    rows = []
    for t in result.trials:
        row = {"trial": t.index}
        row.update(t.hyper.as_dict())
        row["score"] = t.score
        rows.append(row)
    return rows


def summary_dict(result):
    return {
        "metric": result.metric,
        "best_index": result.best_index,
        "best_score": result.best_score,
        "best": result.best.as_dict(),
        "n_trials": len(result.trials),
        "n_failed": result.n_failed,
    }
