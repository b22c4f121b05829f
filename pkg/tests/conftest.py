"""Shared fixtures."""

import numpy as np
import pytest

from bayeslens.categories.finstoch import StochMap, state
from bayeslens.categories.markov import finite_object, gaussian_object


@pytest.fixture
def ab():
    return finite_object(["a", "b"])


@pytest.fixture
def cd():
    return finite_object(["c", "d"])


@pytest.fixture
def noisy(ab, cd):
    """Noisy channel used by the worked inversion example."""
    return StochMap(dom=ab, cod=cd, rows=[[0.8, 0.2], [0.4, 0.6]])


@pytest.fixture
def skewed(ab):
    return state(ab, [0.25, 0.75])


@pytest.fixture
def line():
    return gaussian_object(1)


@pytest.fixture
def rng():
    return np.random.default_rng(7)
