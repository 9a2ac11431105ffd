"""Proximal-gradient (FISTA) solver for the penalized composite loss.

The objective is L(beta) + lambda1*||beta||_1 + lambda2*||beta||_2^2 with L
a CompositeLoss. The proximal step has the closed form

    prox(b0) = soft(b0 - t*grad, t*lambda1) / (1 + 2*t*lambda2)

and steps are chosen by halving backtracks against the usual quadratic
upper bound, growing the step once per iteration so it can recover. The
solve itself runs inside the compiled kernel; this module owns argument
preparation, configuration, and the report type.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DataError, NumericError
from .losses import composite_value_grad

_FAMILY_CODES = {"linear": 0, "logistic": 1}


def soft_threshold(z, lam):
    """Elementwise soft thresholding sign(z) * max(|z| - lam, 0)."""
    z = np.asarray(z, dtype=float)
    return np.sign(z) * np.maximum(np.abs(z) - lam, 0.0)


def prox_update(beta0, grad, t, lambda1, lambda2):
    """One proximal step from beta0 along -grad with step size t."""
    beta0 = np.asarray(beta0, dtype=float)
    grad = np.asarray(grad, dtype=float)
    if t <= 0:
        raise DataError("step size must be positive")
    return soft_threshold(beta0 - t * grad, t * lambda1) / (1.0 + 2.0 * t * lambda2)


def fista_momentum(l_k, u_curr, u_prev):
    """Momentum extrapolation; returns (next point, next momentum scalar)."""
    l_next = (1.0 + np.sqrt(1.0 + 4.0 * l_k * l_k)) / 2.0
    beta_next = u_curr + ((l_k - 1.0) / l_next) * (u_curr - u_prev)
    return beta_next, l_next


@dataclass(frozen=True)
class FistaConfig:
    max_iter: int = 5000
    tol: float = 1e-7
    t0: float = 1.0
    shrink: float = 0.5
    max_backtracks: int = 50
    keep_trace: bool = False

    def __post_init__(self):
        if self.max_iter < 1:
            raise DataError("max_iter must be at least 1")
        if not self.tol > 0:
            raise DataError("tol must be positive")
        if not self.t0 > 0:
            raise DataError("t0 must be positive")
        if not 0.0 < self.shrink < 1.0:
            raise DataError("shrink must lie strictly between 0 and 1")
        if self.max_backtracks < 0:
            raise DataError("max_backtracks must be nonnegative")


@dataclass
class SolveReport:
    beta: np.ndarray
    iterations: int
    final_objective: float
    converged: bool
    objective_trace: np.ndarray | None = None


def solve(cl, lambda1, lambda2, config=None, beta_init=None):
    """Run FISTA on the composite loss; returns a SolveReport.

    The returned beta is the best-objective iterate observed, so its
    objective never exceeds the objective at beta_init. converged=False
    means the iteration budget ran out or backtracking stalled; a
    non-finite objective raises NumericError.
    """
    if config is None:
        config = FistaConfig()
    lambda1 = float(lambda1)
    lambda2 = float(lambda2)
    if lambda1 < 0 or lambda2 < 0:
        raise DataError("penalty weights must be nonnegative")
    p = cl.n_features
    if beta_init is None:
        beta0 = np.zeros(p)
    else:
        beta0 = np.ascontiguousarray(beta_init, dtype=float)
        if beta0.shape != (p,):
            raise DataError(f"beta_init must have shape ({p},)")
    if cl.has_unlabeled_term():
        tu = cl.t
        gamma1 = cl.gamma1
    else:
        tu = np.zeros((0, p))
        gamma1 = 0.0

    beta, iters, best_obj, status, trace = kernels.fista_solve(
        cl.xl, cl.yl, tu, cl.ybar, gamma1, lambda1, lambda2, beta0,
        _FAMILY_CODES[cl.family], config.max_iter, config.tol,
        config.t0, config.shrink, config.max_backtracks,
    )
    if status == 3:
        raise NumericError(
            f"non-finite objective or gradient after {int(iters)} iterations"
        )
    return SolveReport(
        beta=np.asarray(beta),
        iterations=int(iters),
        final_objective=float(best_obj),
        converged=(status == 0),
        objective_trace=np.asarray(trace) if config.keep_trace else None,
    )


def kkt_residual(cl, beta, lambda1, lambda2=0.0):
    """Sup-norm violation of the stationarity conditions at beta.

    For nonzero coordinates the subgradient is pinned at lambda1*sign(beta_j);
    at zeros any value within lambda1 is admissible. The ridge part enters
    through its gradient 2*lambda2*beta.
    """
    beta = np.asarray(beta, dtype=float)
    _, grad = composite_value_grad(cl, beta)
    g = grad + 2.0 * lambda2 * beta
    nonzero = beta != 0.0
    res_nonzero = np.abs(g + lambda1 * np.sign(beta))
    res_zero = np.maximum(np.abs(g) - lambda1, 0.0)
    res = np.where(nonzero, res_nonzero, res_zero)
    return float(np.max(res)) if res.size else 0.0
