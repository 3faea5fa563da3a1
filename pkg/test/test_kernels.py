import hypothesis.strategies as st
import pytest
import torch
from hypothesis import given, settings

from weightlab.core.utils import DTYPE, DomainError, JSONParseError, process_object
from weightlab.kernels import (
    Kernel,
    box,
    catalog,
    convolve,
    convolve_values,
    domination_gap,
    exponential,
    gaussian,
    in_class_K,
    least_decreasing_majorant,
    least_unimodal_majorant,
    one_sided_exponential,
    read_kernel,
    write_kernel,
)
from weightlab.kernels.membership import CERTIFIED, REFUTED
from weightlab.lattice.domain import Grid1D
from weightlab.lattice.functions import GridFunction

H = 1.0 / 64


def catalog_kernels():
    return [
        gaussian(0.01, H),
        box(3, H),
        exponential(20.0, H),
        one_sided_exponential(20.0, H),
        one_sided_exponential(20.0, H, normalization='total'),
    ]


def test_kernel_basics():
    k = Kernel([1.0, 2.0, 3.0], 0.5, 'k')
    assert k.radius == 1
    assert k.offsets.tolist() == [-1, 0, 1]
    assert k.l1 == 3.0
    assert k.at(-1) == 1.0
    assert k.at(5) == 0.0
    assert k.reflect().values.tolist() == [3.0, 2.0, 1.0]
    assert k.scaled(2.0).l1 == 6.0
    assert not k.is_causal
    assert Kernel([0.0, 1.0, 1.0], 1.0).is_causal
    with pytest.raises(DomainError):
        Kernel([1.0, 1.0], 1.0)
    with pytest.raises(DomainError):
        Kernel([1.0], 0.0)


def test_convolve_box():
    f = GridFunction(Grid1D(0.0, 1.0, 5), [0.0, 0.0, 3.0, 0.0, 0.0])
    assert convolve(box(1, 1.0), f).values.tolist() == [0.0, 1.0, 1.0, 1.0, 0.0]
    with pytest.raises(DomainError):
        convolve(box(1, 0.5), f)


def test_convolution_orientation():
    k = Kernel([0.0, 0.0, 1.0], 1.0)
    values = torch.tensor([1.0, 0.0, 0.0], dtype=DTYPE)
    assert convolve_values(k, values).tolist() == [0.0, 1.0, 0.0]


def test_matrix_matches_convolution(generator):
    k = exponential(3.0, 0.25)
    values = torch.rand(20, generator=generator, dtype=DTYPE)
    assert torch.allclose(k.h * k.matrix(20) @ values, convolve_values(k, values))


@pytest.mark.parametrize(
    "k",
    catalog_kernels(),
    ids=["gaussian", "box", "exponential", "causal", "causal_total"],
)
def test_catalog_kernels_are_certified(k, generator):
    verdict = in_class_K(k)
    assert verdict.status == CERTIFIED
    assert verdict.certified
    assert verdict.certificate_mass <= 1.0 + 1e-12
    values = torch.rand((50, 4 * k.radius + 3), generator=generator, dtype=DTYPE)
    assert float(domination_gap(k, values).max()) <= 1e-9


def test_catalog_masses():
    for k in catalog_kernels()[:3]:
        assert k.l1 == pytest.approx(1.0)
    assert one_sided_exponential(20.0, H).l1 < 0.6
    assert in_class_K(catalog_kernels()[-1]).route == 'unimodal'
    assert in_class_K(gaussian(0.01, H)).route == 'decreasing'
    with pytest.raises(DomainError):
        gaussian(0.01, H, mass=1.5)
    with pytest.raises(DomainError):
        one_sided_exponential(1.0, H, normalization='half')


def test_identity_kernel():
    k = gaussian(0.0, 0.1)
    assert k.radius == 0
    assert in_class_K(k).certified


def test_majorants():
    k = Kernel([0.0, 0.0, 0.0, 0.0, 1.0], 1.0)
    assert least_decreasing_majorant(k).tolist() == [1.0] * 5
    assert least_unimodal_majorant(k).tolist() == [0.0, 0.0, 1.0, 1.0, 1.0]
    k = Kernel([1.0, 3.0, 2.0], 1.0)
    assert least_decreasing_majorant(k).tolist() == [2.0, 3.0, 2.0]


def test_heavy_kernel_is_refuted_by_mass():
    verdict = in_class_K(gaussian(0.01, H).scaled(2.0))
    assert verdict.status == REFUTED
    gap = domination_gap(gaussian(0.01, H).scaled(2.0), verdict.witness.values)
    assert float(gap[verdict.violation_cell]) > 0
    assert verdict.violation == pytest.approx(float(gap[verdict.violation_cell]))


def test_shifted_spike_is_refuted():
    k = Kernel([0.0, 0.0, 0.0, 0.0, 1.0], 1.0)
    verdict = in_class_K(k, seed=3)
    assert verdict.status == REFUTED
    assert verdict.witness is not None
    gap = domination_gap(k, verdict.witness.values)
    assert float(gap[verdict.violation_cell]) > 1e-9


def test_split_kernel_is_refuted():
    k = Kernel([0.5, 0.0, 0.0, 0.0, 0.5], 1.0)
    assert k.l1 == 1.0
    assert in_class_K(k).status == REFUTED


@settings(deadline=None, max_examples=30)
@given(
    st.lists(st.floats(min_value=0.0, max_value=1.0), min_size=1, max_size=6),
    st.integers(min_value=0, max_value=10**6),
)
def test_certified_kernels_are_dominated(profile, seed):
    tail = torch.tensor(sorted(profile, reverse=True), dtype=DTYPE)
    values = torch.cat((tail[1:].flip(0), tail))
    if float(values.sum()) == 0.0:
        return
    k = Kernel(values / float(values.sum()), 1.0)
    verdict = in_class_K(k, refute_trials=10)
    assert verdict.certified
    f = torch.rand((20, 40), generator=torch.Generator().manual_seed(seed))
    assert float(domination_gap(k, f.to(DTYPE)).max()) <= 1e-9


def test_kernel_csv(tmp_path):
    k = one_sided_exponential(2.0, 0.5)
    file_name = str(tmp_path / 'k.csv')
    write_kernel(k, file_name)
    other = read_kernel(file_name, 0.5)
    assert torch.equal(other.values, k.values)
    (tmp_path / 'bad.csv').write_text('offset,value\n0,1.0\n2,1.0\n-1,0.0\n')
    with pytest.raises(DomainError, match='offset'):
        read_kernel(str(tmp_path / 'bad.csv'), 1.0)


def test_kernel_from_json():
    dic = {}
    grid = {'id': 'time', 'type': 'Grid1D', 'n_cells': 8, 'half_width': 1.0}
    process_object(grid, dic)
    box_json = {'id': 'b', 'type': 'Kernel', 'name': 'box', 'grid': 'time'}
    k = process_object(dict(box_json, params={'m': 1}), dic)
    assert k.h == 0.25
    assert k.label == 'b'
    assert torch.allclose(k.values, catalog('box', {'m': 1}, 0.25).values)
    k = process_object(
        {'id': 'v', 'type': 'Kernel', 'values': [0.0, 1.0, 0.0], 'cell_width': 1.0}, dic
    )
    assert k.values.tolist() == [0.0, 1.0, 0.0]
    with pytest.raises(JSONParseError):
        process_object(
            {'id': 'x', 'type': 'Kernel', 'name': 'box', 'cell_width': 1.0}, dic
        )
