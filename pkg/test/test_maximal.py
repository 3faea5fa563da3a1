import hypothesis.strategies as st
import pytest
import torch
from hypothesis import given, settings

from weightlab.core.utils import DTYPE, DomainError
from weightlab.lattice.domain import Grid1D, MixedSpace
from weightlab.lattice.functions import GridFunction, LatticeFunction
from weightlab.lattice.norms import reduce_last
from weightlab.maximal import (
    lattice_maximal,
    maximal_function,
    maximal_norm_lower,
    maximal_ratio,
    maximal_reference,
    maximal_values,
    maximizing_interval,
)
from weightlab.weights import power_weight

cell_values = st.lists(
    st.floats(min_value=-1e6, max_value=1e6, allow_nan=False), min_size=1, max_size=40
)


def test_spike(spike):
    expected = torch.tensor([2.0, 4.0, 2.0, 4.0 / 3.0], dtype=DTYPE)
    assert torch.allclose(maximal_values(spike), expected, rtol=0, atol=1e-15)
    f = GridFunction(Grid1D(0.0, 1.0, 4), spike)
    assert torch.equal(maximal_function(f).values, maximal_values(spike))


def test_maximizing_interval(spike):
    f = GridFunction(Grid1D(0.0, 1.0, 4), spike)
    assert maximizing_interval(f, 1) == ((1, 1), 4.0)
    interval, average = maximizing_interval(f, 3)
    assert interval == (1, 3)
    assert average == pytest.approx(4.0 / 3.0)
    with pytest.raises(IndexError):
        maximizing_interval(f, 4)


@settings(deadline=None, max_examples=100)
@given(cell_values)
def test_maximal_values_match_brute_force(values):
    values = torch.tensor(values, dtype=DTYPE)
    assert torch.equal(maximal_values(values), maximal_reference(values))


@settings(deadline=None, max_examples=50)
@given(cell_values, st.floats(min_value=0.0, max_value=10.0))
def test_maximal_function_is_sublinear(values, c):
    f = torch.tensor(values, dtype=DTYPE)
    g = f.flip(0)
    mf = maximal_values(f)
    scale = 1e-9 * (f.abs().max() + 1.0)
    assert bool(torch.all(mf >= f.abs() - scale))
    bound = mf + maximal_values(g) + 2 * scale
    assert bool(torch.all(maximal_values(f + g) <= bound))
    assert torch.allclose(maximal_values(c * f), c * mf, rtol=1e-10, atol=1e-9)


def test_constant_is_fixed(unit_grid):
    f = GridFunction.constant(unit_grid, 2.5)
    assert torch.allclose(maximal_function(f).values, f.values)


def test_batched_rows(generator):
    rows = torch.rand((5, 17), generator=generator, dtype=DTYPE)
    batched = maximal_values(rows)
    for row, expected in zip(rows, batched):
        assert torch.allclose(maximal_values(row), expected, rtol=1e-14, atol=0)


def test_lattice_maximal_is_fiberwise(unit_grid, mixed_space, generator):
    values = torch.rand((8, 3, 2), generator=generator, dtype=DTYPE)
    F = LatticeFunction(unit_grid, mixed_space, values)
    MF = lattice_maximal(F)
    for index in ((0, 0), (2, 1)):
        fiber = maximal_function(F.fiber(index)).values
        assert torch.allclose(MF.fiber(index).values, fiber)


def test_lattice_maximal_without_axes(unit_grid, generator):
    f = GridFunction(unit_grid, torch.rand(8, generator=generator, dtype=DTYPE))
    F = LatticeFunction(unit_grid, MixedSpace([], []), f.values)
    assert torch.allclose(lattice_maximal(F).values, maximal_function(f).values)


def test_maximal_ratio(unit_grid, spike):
    masses = torch.ones(4, dtype=DTYPE)
    expected = reduce_last(maximal_values(spike), masses, 2.0) / 4.0
    assert maximal_ratio(spike, masses, 2.0) == pytest.approx(float(expected))
    assert maximal_ratio(torch.zeros(4, dtype=DTYPE), masses, 2.0) == 0.0


def test_maximal_norm_lower():
    w = power_weight(0.5, Grid1D.symmetric(1.0, 32))
    estimate = maximal_norm_lower(2.0, w, trials=30, seed=4)
    assert estimate.lower_bound > 1.0
    masses = w.grid.h * w.values
    witness = maximal_ratio(estimate.witness.values, masses, 2.0)
    assert witness == pytest.approx(estimate.lower_bound)
    again = maximal_norm_lower(2.0, w, trials=30, seed=4)
    assert again.lower_bound == estimate.lower_bound
    with pytest.raises(DomainError):
        maximal_norm_lower(2.0, w, trials=0, seed=4)

