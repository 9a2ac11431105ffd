"""Fitting the penalized model on a dataset and predicting from it.

fit wires the pieces together: optional shift projection of the unlabeled
block, SVD transform with the (gamma2, gamma3) weights, composite loss with
weight gamma1, then the FISTA solve under (lambda1, lambda2). With gamma1=0
or no unlabeled rows none of the unlabeled machinery runs and the fit is the
ordinary supervised elastic net.

The linear family works on centered labels, so the fitted model carries the
label mean as an intercept restored at prediction; the logistic family has
no intercept and scores through the sigmoid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Dataset, RawTable, preprocess_from_dict, preprocess_to_dict, replay
from .errors import DataError
from .losses import CompositeLoss, sigmoid
from .solver import FistaConfig, SolveReport, solve
from .transform import build_transform, decompose, shift_projection

PREDICT_KINDS = ("link", "probability", "class")


@dataclass(frozen=True)
class Hyperparams:
    lambda1: float = 0.0
    lambda2: float = 0.0
    gamma1: float = 0.0
    gamma2: float = 0.0
    gamma3: float = 0.0

    def __post_init__(self):
        for name in ("lambda1", "lambda2", "gamma1", "gamma2", "gamma3"):
            v = float(getattr(self, name))
            object.__setattr__(self, name, v)
            if not np.isfinite(v) or v < 0:
                raise DataError(f"{name} must be finite and nonnegative")

    def as_dict(self):
        return {
            "lambda1": self.lambda1,
            "lambda2": self.lambda2,
            "gamma1": self.gamma1,
            "gamma2": self.gamma2,
            "gamma3": self.gamma3,
        }


@dataclass
class FittedModel:
    beta: np.ndarray
    intercept: float
    family: str
    hyper: Hyperparams
    preprocess: object
    report: SolveReport
    projection_applied: bool = False

    @property
    def feature_names(self):
        return self.preprocess.feature_names


def fit(ds, hyper, config=None, projection="auto", beta_init=None):
    """Fit the model on a Dataset; returns a FittedModel.

    The unlabeled rows enter only when gamma1 > 0 and the dataset has any;
    they are shift-projected per the projection mode, decomposed, and
    replaced by their transform before joining the loss.
    """
    if not isinstance(ds, Dataset):
        raise DataError("fit expects a Dataset (see build_dataset)")
    family = ds.response_kind
    t = None
    applied = False
    if hyper.gamma1 > 0.0 and ds.n_unlabeled > 0:
        xu, applied = shift_projection(ds.xl, ds.yl, ds.xu, family, projection)
        svd = decompose(xu)
        t = build_transform(svd, hyper.gamma2, hyper.gamma3).t
    ybar = 0.0 if family == "linear" else ds.preprocess.labels_center
    cl = CompositeLoss(
        family=family, xl=ds.xl, yl=ds.yl, t=t, ybar=ybar, gamma1=hyper.gamma1,
    )
    report = solve(cl, hyper.lambda1, hyper.lambda2, config=config,
                   beta_init=beta_init)
    intercept = ds.preprocess.labels_center if family == "linear" else 0.0
    return FittedModel(
        beta=report.beta,
        intercept=float(intercept),
        family=family,
        hyper=hyper,
        preprocess=ds.preprocess,
        report=report,
        projection_applied=applied,
    )


def default_predict_kind(family):
    return "link" if family == "linear" else "probability"


def predict(model, x, kind=None):
    """Predict for new rows.

    x may be a RawTable (replayed through the stored preprocessing) or an
    already-preprocessed matrix. kind defaults to "link" for the linear
    family (the response scale, intercept included) and "probability" for
    the logistic family; "class" thresholds probability at 0.5.
    """
    if kind is None:
        kind = default_predict_kind(model.family)
    if kind not in PREDICT_KINDS:
        raise DataError(f"kind must be one of {PREDICT_KINDS}, got {kind!r}")
    if isinstance(x, RawTable):
        xm = replay(model.preprocess, x)
    else:
        xm = np.asarray(x, dtype=float)
        if xm.ndim != 2 or xm.shape[1] != model.beta.shape[0]:
            raise DataError(
                f"matrix must have {model.beta.shape[0]} preprocessed columns"
            )
    eta = xm @ model.beta
    if model.family == "linear":
        if kind != "link":
            raise DataError("linear models predict on the link scale only")
        return eta + model.intercept
    if kind == "link":
        return eta
    prob = sigmoid(eta)
    if kind == "probability":
        return prob
    return (prob >= 0.5).astype(float)


def model_to_dict(model):
    rep = model.report
    return {
        "format": "s2net.model",
        "version": 1,
        "family": model.family,
        "beta": [float(v) for v in model.beta],
        "intercept": float(model.intercept),
        "hyper": model.hyper.as_dict(),
        "preprocess": preprocess_to_dict(model.preprocess),
        "projection_applied": bool(model.projection_applied),
        "solve": {
            "iterations": int(rep.iterations),
            "final_objective": float(rep.final_objective),
            "converged": bool(rep.converged),
        },
    }


def model_from_dict(d):
    try:
        if d.get("format") != "s2net.model":
            raise DataError("not a model record")
        rep = SolveReport(
            beta=np.array(d["beta"], dtype=float),
            iterations=int(d["solve"]["iterations"]),
            final_objective=float(d["solve"]["final_objective"]),
            converged=bool(d["solve"]["converged"]),
        )
        return FittedModel(
            beta=np.array(d["beta"], dtype=float),
            intercept=float(d["intercept"]),
            family=d["family"],
            hyper=Hyperparams(**d["hyper"]),
            preprocess=preprocess_from_dict(d["preprocess"]),
            report=rep,
            projection_applied=bool(d["projection_applied"]),
        )
    except (KeyError, TypeError) as exc:
        raise DataError(f"malformed model record: {exc}") from exc
