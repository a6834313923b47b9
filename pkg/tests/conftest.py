import numpy as np
import pytest

from greedcert.linalg import normalize_columns


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_dictionary(rng, m, n):
    return normalize_columns(rng.standard_normal((m, n)))


@pytest.fixture
def identity4():
    return normalize_columns(np.eye(4))
