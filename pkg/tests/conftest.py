import numpy as np
import pytest

from weylcap.linalg import random_density_matrix
from weylcap.weyl import WeylChannelSpec, qutrit_example_spec


@pytest.fixture
def qutrit_spec():
    return qutrit_example_spec()


@pytest.fixture
def n2_spec():
    # column-major chain (0.4, 0.3 | 0.2, 0.1), marginals (0.7, 0.3)
    return WeylChannelSpec(2, np.array([[0.4, 0.2], [0.3, 0.1]]), "n2")


def random_states(dim, count, seed=0, rank=None):
    return [random_density_matrix(dim, seed * 10_000 + i, rank=rank) for i in range(count)]
