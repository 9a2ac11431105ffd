"""Fused proximal-gradient solve loop, the package's one hot kernel.

The source function below is written in njit-compatible numpy (explicit
dtypes, np.dot/np.where, no Python objects) and is exposed twice:
``fista_solve_numpy`` runs it as-is, ``fista_solve_numba`` is the
numba-compiled twin. ``fista_solve`` points at whichever flavor the
S2NET_BACKEND environment variable selected. Keeping a single source
guarantees both backends implement identical arithmetic.

Status codes returned by the kernel:
    0  converged (sup-norm step below tol)
    1  iteration budget exhausted
    2  backtracking stalled (no acceptable step found)
    3  non-finite objective or gradient encountered
"""

from __future__ import annotations

import numpy as np

from .backend import ACTIVE_BACKEND, NUMBA_AVAILABLE, compile_kernel


def _fista_solve_src(xl, yl, tu, ybar, gamma1, lambda1, lambda2, beta0,
                     family, max_iter, tol, t0, shrink, max_backtracks):
    """Minimize L(b) + lambda1*||b||_1 + lambda2*||b||_2^2 by FISTA.

    L is the labeled risk plus gamma1 times the unlabeled risk against the
    constant target ybar, both on the sum (not mean) scale. family 0 is
    squared error, family 1 the logistic log-likelihood risk. tu may have
    zero rows; together with gamma1 == 0 that drops the unlabeled term.

    Returns (beta_best, iterations, best_objective, status, trace) where
    trace[k] is the full objective after k proximal steps and beta_best is
    the best-objective iterate seen (never worse than beta0).
    """
    p = xl.shape[1]
    use_u = (gamma1 > 0.0) and (tu.shape[0] > 0)

    def smooth(b, want_grad):
        # risk value and gradient; gradient skipped when not requested
        eta = np.dot(xl, b)
        g = np.zeros(p)
        if family == 0:
            r = eta - yl
            val = np.dot(r, r)
            if want_grad:
                g = 2.0 * np.dot(xl.T, r)
        else:
            # piecewise-stable log(1+exp(eta)); arguments are clamped so the
            # branches not selected by np.where cannot overflow
            lse = np.where(
                eta > 33.3,
                eta,
                np.where(
                    eta > 18.0,
                    eta + np.exp(-np.maximum(eta, 18.0)),
                    np.where(
                        eta >= -37.0,
                        np.log1p(np.exp(np.minimum(eta, 18.0))),
                        np.exp(np.minimum(eta, -37.0)),
                    ),
                ),
            )
            val = np.sum(lse) - np.dot(yl, eta)
            if want_grad:
                ez = np.exp(np.minimum(eta, 0.0))
                sig = np.where(
                    eta >= 0.0,
                    1.0 / (1.0 + np.exp(-np.maximum(eta, 0.0))),
                    ez / (1.0 + ez),
                )
                g = np.dot(xl.T, sig - yl)
        if use_u:
            eta_u = np.dot(tu, b)
            if family == 0:
                ru = eta_u - ybar
                val += gamma1 * np.dot(ru, ru)
                if want_grad:
                    g += gamma1 * 2.0 * np.dot(tu.T, ru)
            else:
                lse_u = np.where(
                    eta_u > 33.3,
                    eta_u,
                    np.where(
                        eta_u > 18.0,
                        eta_u + np.exp(-np.maximum(eta_u, 18.0)),
                        np.where(
                            eta_u >= -37.0,
                            np.log1p(np.exp(np.minimum(eta_u, 18.0))),
                            np.exp(np.minimum(eta_u, -37.0)),
                        ),
                    ),
                )
                val += gamma1 * (np.sum(lse_u) - ybar * np.sum(eta_u))
                if want_grad:
                    ez_u = np.exp(np.minimum(eta_u, 0.0))
                    sig_u = np.where(
                        eta_u >= 0.0,
                        1.0 / (1.0 + np.exp(-np.maximum(eta_u, 0.0))),
                        ez_u / (1.0 + ez_u),
                    )
                    g += gamma1 * np.dot(tu.T, sig_u - ybar)
        return val, g

    def penalty(b):
        return lambda1 * np.sum(np.abs(b)) + lambda2 * np.dot(b, b)

    beta_curr = beta0.copy()
    yv = beta0.copy()
    l_curr = 1.0
    t = t0

    trace = np.empty(max_iter + 1)
    val0, _ = smooth(beta0, False)
    best_f = val0 + penalty(beta0)
    trace[0] = best_f
    best_beta = beta0.copy()

    status = 1
    iters = 0
    u_next = beta_curr
    lu = 0.0
    for k in range(max_iter):
        ly, g = smooth(yv, True)
        if not (np.isfinite(ly) and np.all(np.isfinite(g))):
            status = 3
            break
        if k > 0:
            t = t / shrink
        accepted = False
        for _ in range(max_backtracks + 1):
            z = yv - t * g
            shr = np.abs(z) - t * lambda1
            u_next = np.sign(z) * np.where(shr > 0.0, shr, 0.0) \
                / (1.0 + 2.0 * t * lambda2)
            lu, _ = smooth(u_next, False)
            du = u_next - yv
            bound = ly + np.dot(g, du) + np.dot(du, du) / (2.0 * t)
            if lu <= bound + 1e-12 * (1.0 + np.abs(ly)):
                accepted = True
                break
            t = t * shrink
        if not accepted:
            status = 2
            break
        iters = k + 1
        fu = lu + penalty(u_next)
        trace[iters] = fu
        if fu < best_f:
            best_f = fu
            best_beta = u_next.copy()
        l_next = (1.0 + np.sqrt(1.0 + 4.0 * l_curr * l_curr)) / 2.0
        y_new = u_next + ((l_curr - 1.0) / l_next) * (u_next - beta_curr)
        step_inf = np.max(np.abs(y_new - yv))
        beta_curr = u_next
        yv = y_new
        l_curr = l_next
        if step_inf < tol:
            status = 0
            break
    return best_beta, iters, best_f, status, trace[:iters + 1]


fista_solve_numpy = _fista_solve_src

if NUMBA_AVAILABLE:
    fista_solve_numba = compile_kernel(_fista_solve_src)
else:  # pragma: no cover - exercised only without numba installed
    fista_solve_numba = None

if ACTIVE_BACKEND == "numba":
    fista_solve = fista_solve_numba
else:
    fista_solve = fista_solve_numpy


def warmup():
    """Trigger JIT compilation on a toy problem (no-op for numpy backend).

    Called before forking worker pools so children inherit the compiled
    kernel instead of each paying the compile cost.
    """
    if ACTIVE_BACKEND != "numba":
        return
    xl = np.array([[1.0, 0.0], [0.0, 1.0]])
    yl = np.array([1.0, 0.0])
    tu = np.zeros((0, 2))
    for family in (0, 1):
        fista_solve(xl, yl, tu, 0.0, 0.0, 0.1, 0.1,
                    np.zeros(2), family, 5, 1e-7, 1.0, 0.5, 50)
