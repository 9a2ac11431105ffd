"""Unlabeled-data transform built from an SVD of the centered unlabeled rows.

Writing U S V' for the thin SVD of xu - 1 mu' (mu the unlabeled column
means), the transform with weights (gamma2, gamma3) is

    T = U diag(d) V' + gamma3 * 1 mu',   d_i = sqrt(gamma2) * s_i / sqrt(s_i^2 + gamma2)

so the covariance part shrinks every singular direction toward a ceiling of
sqrt(gamma2) while gamma3 reinjects the location. gamma2 = 0 (or a rank-0
decomposition) collapses T to identical rows gamma3 * mu'; gamma2 -> inf
recovers the centered rows.

The shift projection guards the location term: when the unlabeled mean is
too aligned with the labeled risk gradient direction at zero (within 45
degrees), that component is projected out of the unlabeled rows before the
SVD so the location information cannot fight the labeled signal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .losses import risk_grad

SINGULAR_VALUE_RTOL = 1e-10
PROJECTION_COS_THRESHOLD = 1.0 / np.sqrt(2.0)

PROJECTION_MODES = ("auto", "always", "never")


@dataclass(frozen=True)
class UnlabeledSvd:
    """Thin SVD of the centered unlabeled matrix, tiny directions dropped."""

    u: np.ndarray
    sigma: np.ndarray
    vt: np.ndarray
    mu: np.ndarray

    @property
    def rank(self):
        return self.sigma.shape[0]

    @property
    def n_rows(self):
        return self.u.shape[0]


@dataclass(frozen=True)
class TransformedUnlabeled:
    t: np.ndarray
    gamma2: float
    gamma3: float
    projection_applied: bool = False


def decompose(xu):
    """Center xu by its column means and take the thin SVD.

    Singular values at or below 1e-10 times the largest are truncated along
    with their directions; an all-constant matrix therefore yields rank 0.
    """
    xu = np.asarray(xu, dtype=float)
    if xu.ndim != 2:
        raise DataError("unlabeled matrix must be 2-d")
    if xu.shape[0] < 1:
        raise DataError("unlabeled matrix needs at least one row")
    mu = xu.mean(axis=0)
    centered = xu - mu
    u, sigma, vt = np.linalg.svd(centered, full_matrices=False)
    if sigma.size and sigma[0] > 0.0:
        keep = sigma > SINGULAR_VALUE_RTOL * sigma[0]
    else:
        keep = np.zeros(sigma.shape, dtype=bool)
    return UnlabeledSvd(u=u[:, keep], sigma=sigma[keep], vt=vt[keep, :], mu=mu)


def build_transform(svd, gamma2, gamma3):
    """Assemble the transformed unlabeled matrix for the given weights."""
    gamma2 = float(gamma2)
    gamma3 = float(gamma3)
    if gamma2 < 0 or gamma3 < 0:
        raise DataError("gamma2 and gamma3 must be nonnegative")
    n_rows = svd.n_rows
    location = gamma3 * svd.mu
    if gamma2 == 0.0 or svd.rank == 0:
        # every row is exactly the location term
        t = np.tile(location, (n_rows, 1))
    else:
        d = np.sqrt(gamma2) * svd.sigma / np.sqrt(svd.sigma ** 2 + gamma2)
        t = (svd.u * d) @ svd.vt + location
    return TransformedUnlabeled(t=t, gamma2=gamma2, gamma3=gamma3)


def shift_projection(xl, yl, xu, family, mode="auto"):
    """Remove the labeled-gradient-aligned component of the unlabeled mean.

    p is the unit vector along -grad R(0 | yl, xl). Under mode "auto" the
    projection xu - 1 (mu'p) p' is applied only when |cos angle(mu, p)|
    is at least 1/sqrt(2); "always" applies it whenever the geometry is
    defined; "never" returns xu untouched. Returns (xu_out, applied).
    Degenerate cases (zero gradient, zero mean, no unlabeled rows) skip
    the projection and report applied=False.
    """
    if mode not in PROJECTION_MODES:
        raise DataError(
            f"projection mode must be one of {PROJECTION_MODES}, got {mode!r}"
        )
    xu = np.asarray(xu, dtype=float)
    if mode == "never" or xu.shape[0] == 0:
        return xu, False
    g0 = risk_grad(family, np.zeros(xu.shape[1]), np.asarray(yl, dtype=float),
                   np.asarray(xl, dtype=float))
    g_norm = np.linalg.norm(g0)
    if g_norm == 0.0 or not np.isfinite(g_norm):
        return xu, False
    p = -g0 / g_norm
    mu = xu.mean(axis=0)
    mu_norm = np.linalg.norm(mu)
    if mu_norm == 0.0:
        return xu, False
    cos = abs(float(mu @ p)) / mu_norm
    if mode == "auto" and cos < PROJECTION_COS_THRESHOLD:
        return xu, False
    return xu - np.outer(np.ones(xu.shape[0]), (mu @ p) * p), True
