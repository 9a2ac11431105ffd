"""Synthetic source/target designs for benchmarking.

Both designs draw labeled rows from a source domain and unlabeled, validation
and test rows from a shifted target domain, using a single Philox stream per
bundle so a seed pins every array. Linear labels add Gaussian noise (in the
two-group design its variance is set for a signal-to-noise ratio of 4 in
each domain); logistic labels are Bernoulli through the sigmoid.

Two-group: features split into two blocks with compound-symmetric
covariances that differ between source and target; ten coefficients equal 1
at random positions (five per half), and target coefficients are the source
ones perturbed by independent U[0.9, 1.1] factors.

Extrapolation: isotropic N(0, 0.4 I) features; the target mean is shifted by
delta along a dense ten-coordinate direction that is orthogonal to the true
coefficients in the "lucky" scenario, parallel in "unlucky", and absent in
"same".
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .losses import sigmoid

VALIDATION_ROWS = 20
TWO_GROUP_TEST_ROWS = 800
EXTRAPOLATION_TEST_ROWS = 100

RESPONSES = ("linear", "logistic")
SCENARIOS = ("same", "lucky", "unlucky")
SNR = 4.0
SUPPORT_SIZE = 5
SUPPORT_VALUE = 1.0


@dataclass(frozen=True)
class TwoGroupSpec:
    p: int = 50
    n_source: int = 50
    n_target: int = 50
    response: str = "linear"
    seed: int = 0


@dataclass(frozen=True)
class ExtrapSpec:
    p: int = 100
    n_source: int = 50
    n_target: int = 50
    scenario: str = "same"
    delta: float = 1.0
    response: str = "linear"
    seed: int = 0


@dataclass
class SimBundle:
    """One simulated repetition: train splits plus target-domain holdouts."""

    xl: np.ndarray
    yl: np.ndarray
    xu: np.ndarray
    x_valid: np.ndarray
    y_valid: np.ndarray
    x_test: np.ndarray
    y_test: np.ndarray
    beta_source: np.ndarray
    beta_target: np.ndarray
    response: str
    design: str
    meta: dict


def compound_symmetric(size, diagonal, off_diagonal):
    """size x size matrix with a constant diagonal and constant off-diagonal."""
    m = np.full((size, size), float(off_diagonal))
    np.fill_diagonal(m, float(diagonal))
    return m


def two_group_covariances(p):
    """Block-diagonal source and target covariances for the two-group design.

    Source: first half variance 1 with covariance 0.8, second half variance
    0.05 with covariance 0.01. Target swaps the emphasis: first half variance
    0.1 with covariance 0.01, second half variance 1 with covariance 0.5.
    """
    half = p // 2
    source = np.zeros((p, p))
    target = np.zeros((p, p))
    source[:half, :half] = compound_symmetric(half, 1.0, 0.8)
    source[half:, half:] = compound_symmetric(p - half, 0.05, 0.01)
    target[:half, :half] = compound_symmetric(half, 0.1, 0.01)
    target[half:, half:] = compound_symmetric(p - half, 1.0, 0.5)
    return source, target


def _check_common(spec):
    if spec.response not in RESPONSES:
        raise DataError(f"response must be one of {RESPONSES}")
    if spec.n_source < 1 or spec.n_target < 0:
        raise DataError("need n_source >= 1 and n_target >= 0")


def _gaussian_rows(rng, n, chol):
    return rng.standard_normal((n, chol.shape[0])) @ chol.T


def _linear_labels(rng, x, beta, noise_sd):
    return x @ beta + noise_sd * rng.standard_normal(x.shape[0])


def _logistic_labels(rng, x, beta):
    return (rng.random(x.shape[0]) < sigmoid(x @ beta)).astype(float)


def simulate_two_group(spec):
    """Draw one two-group repetition; returns a SimBundle."""
    _check_common(spec)
    p = spec.p
    if p % 2 != 0 or p < 12:
        raise DataError(
            "two-group design needs an even p of at least 12 "
            "(five support positions per half)"
        )
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(spec.seed)))
    half = p // 2
    # five support positions in each half (the first half excludes its last
    # slot, which belongs to the second half's range)
    first = rng.choice(half - 1, size=SUPPORT_SIZE, replace=False)
    second = rng.choice(np.arange(half - 1, p), size=SUPPORT_SIZE, replace=False)
    beta = np.zeros(p)
    beta[first] = SUPPORT_VALUE
    beta[second] = SUPPORT_VALUE
    beta_target = beta * rng.uniform(0.9, 1.1, size=p)

    cov_s, cov_t = two_group_covariances(p)
    chol_s = np.linalg.cholesky(cov_s)
    chol_t = np.linalg.cholesky(cov_t)
    noise_sd_s = noise_sd_t = 0.0
    if spec.response == "linear":
        noise_sd_s = float(np.sqrt(beta @ cov_s @ beta / SNR))
        noise_sd_t = float(np.sqrt(beta_target @ cov_t @ beta_target / SNR))

    xl = _gaussian_rows(rng, spec.n_source, chol_s)
    if spec.response == "linear":
        yl = _linear_labels(rng, xl, beta, noise_sd_s)
    else:
        yl = _logistic_labels(rng, xl, beta)
    xu = _gaussian_rows(rng, spec.n_target, chol_t)
    x_valid = _gaussian_rows(rng, VALIDATION_ROWS, chol_t)
    x_test = _gaussian_rows(rng, TWO_GROUP_TEST_ROWS, chol_t)
    if spec.response == "linear":
        y_valid = _linear_labels(rng, x_valid, beta_target, noise_sd_t)
        y_test = _linear_labels(rng, x_test, beta_target, noise_sd_t)
    else:
        y_valid = _logistic_labels(rng, x_valid, beta_target)
        y_test = _logistic_labels(rng, x_test, beta_target)

    return SimBundle(
        xl=xl, yl=yl, xu=xu, x_valid=x_valid, y_valid=y_valid,
        x_test=x_test, y_test=y_test,
        beta_source=beta, beta_target=beta_target,
        response=spec.response, design="two-group",
        meta={
            "design": "two-group", "response": spec.response, "p": p,
            "n_source": spec.n_source, "n_target": spec.n_target,
            "seed": spec.seed, "noise_sd_source": noise_sd_s,
            "noise_sd_target": noise_sd_t,
        },
    )


def extrapolation_patterns(p):
    """The dense shift direction and the two coefficient patterns."""
    lucky = np.zeros(p)
    lucky[:5] = 1.0
    lucky[5:10] = -1.0
    unlucky = np.zeros(p)
    unlucky[:10] = 1.0
    return lucky, unlucky


def simulate_extrapolation(spec):
    """Draw one extrapolation repetition; returns a SimBundle."""
    _check_common(spec)
    p = spec.p
    if p < 10:
        raise DataError("extrapolation design needs p >= 10")
    if spec.scenario not in SCENARIOS:
        raise DataError(f"scenario must be one of {SCENARIOS}")
    if not np.isfinite(spec.delta):
        raise DataError("delta must be finite")
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(spec.seed)))
    lucky, unlucky = extrapolation_patterns(p)
    scale = 5.0 / np.sqrt(10.0)
    beta = scale * (unlucky if spec.scenario == "unlucky" else lucky)
    target_mean = np.zeros(p) if spec.scenario == "same" \
        else spec.delta * unlucky
    feat_sd = np.sqrt(0.4)
    noise_sd = np.sqrt(2.5) if spec.response == "linear" else 0.0

    def draw_x(n, mean):
        return mean + feat_sd * rng.standard_normal((n, p))

    def draw_y(x):
        if spec.response == "linear":
            return _linear_labels(rng, x, beta, noise_sd)
        return _logistic_labels(rng, x, beta)

    xl = draw_x(spec.n_source, np.zeros(p))
    yl = draw_y(xl)
    xu = draw_x(spec.n_target, target_mean)
    x_valid = draw_x(VALIDATION_ROWS, target_mean)
    y_valid = draw_y(x_valid)
    x_test = draw_x(EXTRAPOLATION_TEST_ROWS, target_mean)
    y_test = draw_y(x_test)

    return SimBundle(
        xl=xl, yl=yl, xu=xu, x_valid=x_valid, y_valid=y_valid,
        x_test=x_test, y_test=y_test,
        beta_source=beta, beta_target=beta.copy(),
        response=spec.response, design="extrapolation",
        meta={
            "design": "extrapolation", "response": spec.response, "p": p,
            "n_source": spec.n_source, "n_target": spec.n_target,
            "scenario": spec.scenario, "delta": spec.delta,
            "seed": spec.seed, "noise_sd": noise_sd,
        },
    )
