import numpy as np
import pytest


@pytest.fixture
def rng():
    def make(seed):
        return np.random.Generator(np.random.Philox(seed))

    return make
