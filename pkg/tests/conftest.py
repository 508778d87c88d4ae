import numpy as np
import pytest


@pytest.fixture(scope="session")
def rng42():
    return np.random.Generator(np.random.Philox(key=42))
