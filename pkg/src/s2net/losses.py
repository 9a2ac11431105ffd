"""Risk functions and the composite labeled-plus-unlabeled objective.

Risks are on the sum scale (no 1/n), which is what the penalty weights are
calibrated against. The linear family is squared error; the logistic family
is the negative Bernoulli log-likelihood written through a numerically
stable log(1+exp(.)). The composite loss adds gamma1 times the risk of the
transformed unlabeled rows against the constant target ybar.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError

FAMILIES = ("linear", "logistic")


def stable_log1pexp(eta):
    """log(1 + exp(eta)) evaluated piecewise so it never overflows.

    Branches: eta above 33.3 returns eta (the +1 is below double epsilon);
    (18, 33.3] returns eta + exp(-eta); [-37, 18] the direct log1p(exp(eta));
    below -37 just exp(eta). Accepts scalars or arrays.
    """
    eta_arr = np.asarray(eta, dtype=float)
    out = np.where(
        eta_arr > 33.3,
        eta_arr,
        np.where(
            eta_arr > 18.0,
            eta_arr + np.exp(-np.maximum(eta_arr, 18.0)),
            np.where(
                eta_arr >= -37.0,
                np.log1p(np.exp(np.minimum(eta_arr, 18.0))),
                np.exp(np.minimum(eta_arr, -37.0)),
            ),
        ),
    )
    if np.isscalar(eta) or np.ndim(eta) == 0:
        return float(out)
    return out


def sigmoid(eta):
    """Logistic cdf 1/(1+exp(-eta)), stable for large |eta|."""
    eta_arr = np.asarray(eta, dtype=float)
    ez = np.exp(np.minimum(eta_arr, 0.0))
    out = np.where(
        eta_arr >= 0.0,
        1.0 / (1.0 + np.exp(-np.maximum(eta_arr, 0.0))),
        ez / (1.0 + ez),
    )
    if np.isscalar(eta) or np.ndim(eta) == 0:
        return float(out)
    return out


def _check_family(family):
    if family not in FAMILIES:
        raise DataError(f"unknown family {family!r}, expected one of {FAMILIES}")


def _check_shapes(beta, y, x):
    if x.ndim != 2:
        raise DataError(f"design matrix must be 2-d, got shape {x.shape}")
    if beta.shape != (x.shape[1],):
        raise DataError(
            f"beta has shape {beta.shape}, design has {x.shape[1]} columns"
        )
    if y.shape != (x.shape[0],):
        raise DataError(
            f"targets have shape {y.shape}, design has {x.shape[0]} rows"
        )


def risk_value(family, beta, y, x):
    """Sum-scale risk of linear predictor x @ beta against targets y."""
    _check_family(family)
    beta = np.asarray(beta, dtype=float)
    y = np.asarray(y, dtype=float)
    x = np.asarray(x, dtype=float)
    _check_shapes(beta, y, x)
    eta = x @ beta
    if family == "linear":
        r = eta - y
        return float(r @ r)
    return float(np.sum(stable_log1pexp(eta)) - y @ eta)


def risk_grad(family, beta, y, x):
    """Gradient of risk_value with respect to beta."""
    _check_family(family)
    beta = np.asarray(beta, dtype=float)
    y = np.asarray(y, dtype=float)
    x = np.asarray(x, dtype=float)
    _check_shapes(beta, y, x)
    eta = x @ beta
    if family == "linear":
        return 2.0 * (x.T @ (eta - y))
    return x.T @ (sigmoid(eta) - y)


@dataclass
class CompositeLoss:
    """Labeled risk plus gamma1 times unlabeled risk against a constant target.

    t is the transformed unlabeled matrix (None or zero rows drop the term);
    ybar is the constant target every unlabeled row is pulled toward. For the
    logistic family ybar must lie in [0, 1] (it enters as a fractional label,
    which the likelihood accepts).
    """

    family: str
    xl: np.ndarray
    yl: np.ndarray
    t: np.ndarray | None = None
    ybar: float = 0.0
    gamma1: float = 0.0

    def __post_init__(self):
        _check_family(self.family)
        self.xl = np.ascontiguousarray(self.xl, dtype=float)
        self.yl = np.ascontiguousarray(self.yl, dtype=float)
        if self.xl.ndim != 2:
            raise DataError("xl must be a 2-d matrix")
        if self.yl.shape != (self.xl.shape[0],):
            raise DataError("yl length must match xl rows")
        if self.xl.shape[0] < 1:
            raise DataError("need at least one labeled row")
        if self.t is not None:
            self.t = np.ascontiguousarray(self.t, dtype=float)
            if self.t.ndim != 2 or self.t.shape[1] != self.xl.shape[1]:
                raise DataError("t must have the same number of columns as xl")
        self.ybar = float(self.ybar)
        self.gamma1 = float(self.gamma1)
        if self.gamma1 < 0:
            raise DataError("gamma1 must be nonnegative")
        if self.family == "logistic":
            if not np.all((self.yl == 0.0) | (self.yl == 1.0)):
                raise DataError("logistic labels must be 0/1")
            if not 0.0 <= self.ybar <= 1.0:
                raise DataError("logistic ybar must lie in [0, 1]")

    @property
    def n_features(self):
        return self.xl.shape[1]

    def has_unlabeled_term(self):
        return self.gamma1 > 0.0 and self.t is not None and self.t.shape[0] > 0

    def unlabeled_target(self):
        """The replicated constant target, one entry per unlabeled row."""
        n_u = 0 if self.t is None else self.t.shape[0]
        return np.full(n_u, self.ybar)


def composite_value(cl, beta):
    """Value of the composite smooth loss at beta."""
    beta = np.asarray(beta, dtype=float)
    val = risk_value(cl.family, beta, cl.yl, cl.xl)
    if cl.has_unlabeled_term():
        val += cl.gamma1 * risk_value(cl.family, beta, cl.unlabeled_target(), cl.t)
    return val


def composite_value_grad(cl, beta):
    """Value and gradient of the composite smooth loss at beta."""
    beta = np.asarray(beta, dtype=float)
    val = risk_value(cl.family, beta, cl.yl, cl.xl)
    grad = risk_grad(cl.family, beta, cl.yl, cl.xl)
    if cl.has_unlabeled_term():
        target = cl.unlabeled_target()
        val += cl.gamma1 * risk_value(cl.family, beta, target, cl.t)
        grad += cl.gamma1 * risk_grad(cl.family, beta, target, cl.t)
    return val, grad
