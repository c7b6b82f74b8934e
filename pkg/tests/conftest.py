import numpy as np
import pytest

from opcalc.algebra import PartitionGeometry
from opcalc.testing import random_element, random_geometry


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def make_random(rng):
    def _make(N, S, M, density=0.7):
        g = random_geometry(rng, N, S, M)
        return random_element(rng, g, density)

    return _make


@pytest.fixture
def unit_interval():
    return PartitionGeometry([[0.0]], 1.0)
