import numpy as np
import pytest

from confsym.geometry import Metric

SEED = 42


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)


@pytest.fixture(params=[3, 4, 5, 6])
def metric(request):
    return Metric(request.param)


@pytest.fixture
def metric4():
    return Metric(4)


@pytest.fixture
def metric3():
    return Metric(3)
