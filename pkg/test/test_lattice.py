import math

import hypothesis.strategies as st
import pytest
import torch
from hypothesis import given, settings

from weightlab.core.utils import DTYPE, DomainError, make_generator
from weightlab.lattice.domain import Grid1D, MeasuredAxis, MixedSpace
from weightlab.lattice.functions import GridFunction, LatticeFunction
from weightlab.lattice.io import (
    read_grid_function,
    read_lattice_function,
    write_grid_function,
    write_lattice_function,
)
from weightlab.lattice.norms import (
    fiber_norms,
    lattice_norm,
    mixed_norm,
    tuple_norm,
    weighted_lp_norm,
)

exponents = st.one_of(st.floats(min_value=1.0, max_value=20.0), st.just(math.inf))


def test_grid():
    grid = Grid1D.symmetric(1.0, 4)
    assert grid.h == 0.5
    assert grid.edges.tolist() == [-1.0, -0.5, 0.0, 0.5, 1.0]
    assert grid.centers.tolist() == [-0.75, -0.25, 0.25, 0.75]
    assert grid.refine(2) == Grid1D(-1.0, 0.25, 8)
    with pytest.raises(DomainError):
        Grid1D(0.0, 0.0, 4)
    with pytest.raises(DomainError):
        Grid1D(0.0, 1.0, 0)


def test_measured_axis_rejects_bad_masses():
    with pytest.raises(DomainError):
        MeasuredAxis([1.0, 0.0])
    with pytest.raises(DomainError):
        MeasuredAxis([])


def test_mixed_space():
    space = MixedSpace.counting([3, 2], ['inf', 1.5])
    assert space.shape == (3, 2)
    assert space.dim == 6
    assert space.exponents == [math.inf, 1.5]
    assert space.dual().exponents == [1.0, 3.0]
    with pytest.raises(DomainError):
        MixedSpace.counting([3], [0.5])
    with pytest.raises(DomainError):
        MixedSpace.counting([3, 2], [2.0])


def test_mixed_norm_iterates_inner_axis_first():
    F = torch.tensor([[3.0, 4.0], [0.0, 1.0]], dtype=DTYPE)
    space = MixedSpace.counting([2, 2], [1.0, 2.0])
    assert float(mixed_norm(F, space)) == pytest.approx(6.0)
    space = MixedSpace.counting([2, 2], [math.inf, 1.0])
    assert float(mixed_norm(F, space)) == pytest.approx(7.0)


def test_mixed_norm_with_masses():
    space = MixedSpace([MeasuredAxis([0.5, 2.0])], [2.0])
    F = torch.tensor([2.0, 1.0], dtype=DTYPE)
    assert float(mixed_norm(F, space)) == pytest.approx(math.sqrt(4.0))


def test_flat_space_equals_flattened_norm(generator):
    space = MixedSpace.counting([3, 4], [3.0, 3.0])
    F = torch.randn((5, 3, 4), generator=generator, dtype=DTYPE)
    flat = space.flatten()
    assert torch.allclose(mixed_norm(F, space), mixed_norm(F.reshape(5, 12), flat))
    expected = (F.abs() ** 3).sum((-1, -2)) ** (1.0 / 3.0)
    assert torch.allclose(mixed_norm(F, space), expected)


def test_mixed_norm_large_exponent_does_not_overflow():
    space = MixedSpace.counting([2], [100.0])
    F = torch.tensor([1e10, 1e10], dtype=DTYPE)
    assert float(mixed_norm(F, space)) == pytest.approx(1e10 * 2 ** 0.01)


def test_mixed_norm_shape_mismatch(mixed_space):
    with pytest.raises(DomainError):
        mixed_norm(torch.ones(2, 3), mixed_space)


@settings(deadline=None, max_examples=50)
@given(exponents, exponents, st.integers(min_value=0, max_value=10**6))
def test_mixed_norm_is_a_lattice_norm(q1, q2, seed):
    space = MixedSpace.counting([3, 4], [q1, q2])
    generator = make_generator(seed)
    F = torch.randn((3, 4), generator=generator, dtype=DTYPE)
    G = torch.randn((3, 4), generator=generator, dtype=DTYPE)
    norm_f = float(mixed_norm(F, space))
    norm_g = float(mixed_norm(G, space))
    assert float(mixed_norm(F + G, space)) <= (norm_f + norm_g) * (1 + 1e-12)
    assert float(mixed_norm(-2.5 * F, space)) == pytest.approx(2.5 * norm_f)
    larger = F.abs() + G.abs()
    assert norm_f <= float(mixed_norm(larger, space)) * (1 + 1e-12)


def test_weighted_lp_norm(unit_grid):
    f = GridFunction(unit_grid, torch.ones(8, dtype=DTYPE))
    w = GridFunction(unit_grid, torch.full((8,), 2.0, dtype=DTYPE))
    assert float(weighted_lp_norm(f, 2.0)) == pytest.approx(math.sqrt(8.0))
    assert float(weighted_lp_norm(f, 2.0, w)) == pytest.approx(4.0)
    with pytest.raises(DomainError):
        weighted_lp_norm(f, 2.0, GridFunction(Grid1D(0.0, 1.0, 8), -w.values))


def test_lattice_norm_and_fibers(unit_grid, mixed_space):
    values = torch.ones((8, 3, 2), dtype=DTYPE)
    F = LatticeFunction(unit_grid, mixed_space, values)
    fibers = fiber_norms(F)
    inner = math.sqrt(3.0 * (2.0 ** (1.0 / 3.0)) ** 2)
    assert torch.allclose(fibers.values, torch.full((8,), inner, dtype=DTYPE))
    assert float(lattice_norm(F, 2.0)) == pytest.approx(inner * math.sqrt(8.0))
    assert F.fibers().shape == (6, 8)
    assert torch.equal(F.fiber((1, 0)).values, torch.ones(8, dtype=DTYPE))


def test_tuple_norm():
    space = MixedSpace.counting([2], [1.0])
    fs = [
        torch.tensor([1.0, 0.0], dtype=DTYPE),
        torch.tensor([0.0, 2.0], dtype=DTYPE),
        torch.tensor([1.0, 2.0], dtype=DTYPE),
    ]
    assert float(tuple_norm(fs, 1.0, space)) == pytest.approx(6.0)
    assert float(tuple_norm(fs, math.inf, space)) == pytest.approx(3.0)
    assert float(tuple_norm(fs, 2.0, space)) == pytest.approx(3.0 * math.sqrt(2.0))
    with pytest.raises(DomainError):
        tuple_norm([], 2.0, space)


def test_grid_function_csv(tmp_path):
    grid = Grid1D(-1.0, 0.25, 3)
    f = GridFunction(grid, [0.5, 1.0 / 3.0, 2.0])
    file_name = str(tmp_path / 'f.csv')
    write_grid_function(f, file_name)
    g = read_grid_function(file_name)
    assert g.grid == grid
    assert torch.equal(g.values, f.values)


def test_lattice_function_csv(tmp_path, mixed_space):
    grid = Grid1D(0.0, 1.0, 2)
    values = torch.arange(12, dtype=DTYPE).reshape(2, 3, 2)
    file_name = str(tmp_path / 'F.csv')
    write_lattice_function(LatticeFunction(grid, mixed_space, values), file_name)
    with open(file_name) as fp:
        assert 'cell,v0.0,v0.1,v1.0,v1.1,v2.0,v2.1' in fp.read()
    F = read_lattice_function(file_name, mixed_space)
    assert torch.equal(F.values, values)


@pytest.mark.parametrize(
    "content,message",
    [
        ('cell,value\n0,1.0\n2,1.0\n', 'row 3'),
        ('cell,value\n0,abc\n', 'row 2'),
        ('cell,value\n0,nan\n', 'NaN'),
        ('index,value\n0,1.0\n', 'header'),
        ('cell,value\n', 'no data'),
    ],
)
def test_read_grid_function_errors(tmp_path, content, message):
    file_name = tmp_path / 'bad.csv'
    file_name.write_text(content)
    with pytest.raises(DomainError, match=message):
        read_grid_function(str(file_name))
