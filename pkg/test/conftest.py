import pytest
import torch

from weightlab.core.utils import DTYPE, make_generator
from weightlab.lattice.domain import Grid1D, MixedSpace


@pytest.fixture
def unit_grid():
    return Grid1D(0.0, 1.0, 8)


@pytest.fixture
def symmetric_grid():
    return Grid1D.symmetric(1.0, 32)


@pytest.fixture
def generator():
    return make_generator(1)


@pytest.fixture
def mixed_space():
    return MixedSpace.counting([3, 2], [2.0, 3.0])


@pytest.fixture
def spike():
    return torch.tensor([0.0, 4.0, 0.0, 0.0], dtype=DTYPE)
