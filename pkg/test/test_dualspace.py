import math

import pytest
import torch

from weightlab.core.utils import DTYPE, DomainError
from weightlab.dualspace import (
    norming_function,
    pairing,
    tuple_duality_constants,
    tuple_space,
    verify_duality_pairing,
)
from weightlab.lattice.domain import MeasuredAxis, MixedSpace
from weightlab.lattice.norms import mixed_norm

SPACES = [
    MixedSpace.counting([5], [3.0]),
    MixedSpace.counting([3, 2], [3.0, 1.5]),
    MixedSpace(
        [MeasuredAxis([0.5, 2.0]), MeasuredAxis([1.0, 3.0, 0.25])], [2.5, 4.0]
    ),
    MixedSpace.counting([2, 2, 3], [1.2, 6.0, 2.0]),
]


@pytest.mark.parametrize("space", SPACES, ids=lambda space: str(space.shape))
def test_norming_function_attains_holder(space, generator):
    g = torch.randn(space.shape, generator=generator, dtype=DTYPE)
    witness = norming_function(g, space)
    q = space.dual().exponents[0]
    assert witness.dual_norm == pytest.approx(float(mixed_norm(g, space.dual())))
    assert witness.pairing == pytest.approx(witness.dual_norm**q, rel=1e-8)
    assert witness.norm == pytest.approx(witness.dual_norm ** (q - 1.0), rel=1e-8)
    assert witness.pairing == pytest.approx(witness.norm * witness.dual_norm, rel=1e-8)


def test_norming_function_zero_fiber():
    space = MixedSpace.counting([2, 2], [2.0, 3.0])
    g = torch.tensor([[0.0, 0.0], [1.0, -2.0]], dtype=DTYPE)
    witness = norming_function(g, space)
    assert witness.f[0].tolist() == [0.0, 0.0]
    assert witness.f[1, 1] < 0


def test_norming_function_rejects_bad_input():
    space = MixedSpace.counting([2], [2.0])
    with pytest.raises(DomainError):
        norming_function([0.0, 0.0], space)
    with pytest.raises(DomainError):
        norming_function([1.0, 0.0, 1.0], space)
    with pytest.raises(DomainError):
        norming_function([1.0, 1.0], MixedSpace.counting([2], [1.0]))
    with pytest.raises(DomainError):
        norming_function([1.0, 1.0], MixedSpace.counting([2], ['inf']))


def test_pairing_is_batched():
    space = MixedSpace([MeasuredAxis([0.5, 2.0])], [2.0])
    f = torch.tensor([[1.0, 1.0], [2.0, 0.0]], dtype=DTYPE)
    g = torch.tensor([2.0, 1.0], dtype=DTYPE)
    assert pairing(f, g, space).tolist() == [3.0, 2.0]


def test_verify_duality_pairing():
    space = SPACES[1]
    g = torch.arange(1.0, 7.0, dtype=DTYPE).reshape(3, 2)
    report = verify_duality_pairing(g, space, trials=200, seed=2)
    assert report.holder_ok
    assert report.gap >= -1e-9 * report.dual_norm
    assert report.sampled_max <= report.witness_value * (1 + 1e-9)
    assert report.witness_value == pytest.approx(report.dual_norm, rel=1e-8)
    zero = verify_duality_pairing(torch.zeros(3, 2, dtype=DTYPE), space, trials=5)
    assert zero.holder_ok and zero.dual_norm == 0.0
    with pytest.raises(DomainError):
        verify_duality_pairing(g, space, trials=0)


@pytest.mark.parametrize("N,r", [(1, 2.0), (2, 2.0), (3, 1.5), (4, 1.0), (5, math.inf)])
def test_tuple_duality_constants(N, r):
    space = MixedSpace.counting([3], [2.0])
    report = tuple_duality_constants(space, N, r, trials=100, seed=1)
    assert report.passed
    assert report.worst_slack <= 1e-9
    upper_r = N ** (1.0 / r)
    assert report.identical[0] == pytest.approx(N ** (1.0 - 1.0 / r))
    assert report.identical[1] == pytest.approx(upper_r)
    if N <= 3:
        assert report.disjoint == pytest.approx((1.0, 1.0))
    else:
        assert report.disjoint is None
    if 1.0 < r < math.inf:
        assert report.dual_witness_gap < 1e-8
    else:
        assert report.dual_witness_gap is None


def test_tuple_space():
    space = tuple_space(MixedSpace.counting([3], [2.0]), 4, 1.5)
    assert space.shape == (3, 4)
    assert space.exponents == [2.0, 1.5]
    with pytest.raises(DomainError):
        tuple_duality_constants(MixedSpace.counting([3], [2.0]), 0, 2.0)
