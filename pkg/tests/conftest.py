import numpy as np
import pytest

from jamiton import ModelParams


@pytest.fixture(scope="session")
def params() -> ModelParams:
    return ModelParams.canonical()


@pytest.fixture(scope="session")
def rng() -> np.random.Generator:
    return np.random.default_rng(20260808)
