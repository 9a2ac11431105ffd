import numpy as np
import pytest

from s2net import CompositeLoss


def make_rng(seed):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


def random_composite(seed, family="linear", n=30, p=8, n_u=20, gamma1=0.5,
                     ybar=None):
    """A random composite loss instance for solver and gradient tests."""
    rng = make_rng(seed)
    xl = rng.standard_normal((n, p))
    if family == "linear":
        yl = rng.standard_normal(n)
        if ybar is None:
            ybar = float(rng.standard_normal())
    else:
        yl = (rng.random(n) < 0.5).astype(float)
        if ybar is None:
            ybar = float(rng.uniform(0.1, 0.9))
    t = rng.standard_normal((n_u, p)) if n_u else None
    return CompositeLoss(family=family, xl=xl, yl=yl, t=t, ybar=ybar,
                         gamma1=gamma1)


@pytest.fixture
def rng():
    return make_rng(0)
