import numpy as np
import pytest
from hypothesis import settings

from skillassess.features import feature_matrix
from skillassess.synth import gen_population

settings.register_profile("default", max_examples=50, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def population():
    """8 surgeons x 5 trials, fully separated classes."""
    return gen_population(4, 4, 5, separation=1.0, seed=11)


@pytest.fixture(scope="session")
def population_features(population):
    dataset, _ = population
    return feature_matrix(t for _, t in dataset)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
