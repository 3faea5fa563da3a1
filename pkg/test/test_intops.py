import os

import pytest
import torch

from weightlab.cli.intop import load_configuration
from weightlab.core.utils import DTYPE, DomainError, process_objects
from weightlab.intops import (
    IntegralOperator,
    TheoremExperiment,
    adjoint_integral_operator,
    apply_integral_operator,
    extend_evolution_family,
    heat_evolution_family,
    identity_evolution_family,
    integral_family,
    random_multiplication_family,
    structured_certificates,
    uniform_bound_check,
)
from weightlab.intops.evolution import evolution_family_from_json
from weightlab.kernels import box, convolve_values, gaussian, one_sided_exponential
from weightlab.lattice.domain import Grid1D, MixedSpace
from weightlab.sbound import SearchOptions
from weightlab.weights import PowerWeightFamily, Weight, power_weight

CONFIG = os.path.join(
    os.path.dirname(os.path.dirname(__file__)), 'configs', 'heat_family.json'
)


@pytest.fixture
def time_grid():
    return Grid1D.symmetric(1.0, 8)


@pytest.fixture
def heat(time_grid):
    return heat_evolution_family(time_grid, Grid1D(0.0, 1.0, 4), 2.0, scale=0.5)


def test_heat_family(heat):
    assert heat.is_causal
    assert heat.semigroup_defect() < 1e-10
    assert heat.uniform_bound() == pytest.approx(1.0)
    assert torch.allclose(heat(3, 3), torch.eye(4, dtype=DTYPE))
    assert not bool(heat(2, 5).any())
    twice = heat.adjoint().adjoint()
    assert torch.allclose(twice.operators, heat.operators)


def test_heat_family_rejects_bad_input(time_grid):
    with pytest.raises(DomainError):
        heat_evolution_family(time_grid, Grid1D(0.0, 1.0, 4), 2.0, scale=0.0)
    with pytest.raises(DomainError):
        heat_evolution_family(time_grid, Grid1D(0.0, 1.0, 4), 2.0, boundary='open')
    with pytest.raises(DomainError):
        heat_evolution_family(time_grid, Grid1D(0.0, 1.0, 2), 2.0)


def test_zero_padded_heat_is_contractive(time_grid):
    family = heat_evolution_family(
        time_grid, Grid1D(0.0, 1.0, 6), 2.0, boundary='zero_padded'
    )
    assert family.is_causal
    assert family.uniform_bound() <= 1.0 + 1e-9


def test_multiplication_families(time_grid):
    space = MixedSpace.counting([3], [2.0])
    family = random_multiplication_family(time_grid, space, seed=2, bound=0.5)
    assert family.is_causal
    assert family.multiplier_bound() <= 0.5
    identity = identity_evolution_family(time_grid, space)
    assert identity.multiplier_bound() == 1.0
    assert identity.semigroup_defect() == 0.0
    with pytest.raises(DomainError):
        heat_evolution_family(time_grid, Grid1D(0.0, 1.0, 3), 2.0).multiplier_bound()


def test_extension_by_zero(time_grid):
    space = MixedSpace.counting([2], [2.0])
    full = MixedSpace.counting([4], [2.0])
    family = random_multiplication_family(time_grid, space, seed=0)
    extended = extend_evolution_family(family, [1, 3], full)
    assert extended.space == full
    assert extended.uniform_bound() == pytest.approx(family.uniform_bound())
    assert not bool(extended.operators[..., 0, :].any())
    with pytest.raises(DomainError):
        extend_evolution_family(family, [1, 1], full)


def test_family_from_json(time_grid):
    family = evolution_family_from_json(
        {'kind': 'multiplication', 'points': 3, 'bound': 0.25}, time_grid, 2.0, seed=1
    )
    assert family.multiplier_bound() <= 0.25
    with pytest.raises(DomainError):
        evolution_family_from_json({'kind': 'wave', 'points': 3}, time_grid, 2.0)


def test_operator_needs_matching_cell_width(heat):
    with pytest.raises(DomainError):
        IntegralOperator(box(1, 0.5), heat)


def test_noncausal_identity_is_convolution(time_grid, generator):
    space = MixedSpace.counting([2], [2.0])
    family = identity_evolution_family(time_grid, space, causal=False)
    k = box(1, time_grid.h)
    op = IntegralOperator(k, family)
    assert op.certified
    f = torch.randn((3, 8, 2), generator=generator, dtype=DTYPE)
    expected = convolve_values(k, f.movedim(1, -1)).movedim(-1, 1)
    assert torch.allclose(apply_integral_operator(op, f), expected)
    flat = op.matrix() @ f[0].reshape(-1)
    assert torch.allclose(flat.reshape(8, 2), expected[0])


def test_adjoint_integral_operator(heat, generator):
    op = IntegralOperator(one_sided_exponential(2.0, heat.time_grid.h), heat, True)
    adjoint = adjoint_integral_operator(op)
    assert adjoint.kernel.label.endswith('~')
    f = torch.randn((8, 4), generator=generator, dtype=DTYPE)
    g = torch.randn((8, 4), generator=generator, dtype=DTYPE)
    mu = heat.space.masses().reshape(-1)
    left = (apply_integral_operator(op, f) * g * mu).sum()
    right = (f * apply_integral_operator(adjoint, g) * mu).sum()
    assert float(left) == pytest.approx(float(right))


def test_uniform_bound_chain(heat):
    v = power_weight(0.3, heat.time_grid)
    op = IntegralOperator(gaussian(0.02, heat.time_grid.h), heat)
    report = uniform_bound_check(op, 2.0, v, trials=20, seed=3)
    assert report.passed
    assert report.failed_item is None
    assert report.minkowski_ratio <= 1.0 + 1e-9
    assert report.maximal_ratio <= 1.0 + 1e-9
    assert report.norm_ratio <= 1.0 + 1e-9


def test_uniform_bound_rescaling(heat):
    v = Weight.constant(heat.time_grid)
    op = IntegralOperator(box(1, heat.time_grid.h), heat.scaled(2.0))
    with pytest.raises(DomainError):
        uniform_bound_check(op, 2.0, v, trials=4)
    report = uniform_bound_check(op, 2.0, v, trials=4, rescale=True)
    assert report.passed
    assert report.family_bound == pytest.approx(2.0)
    with pytest.raises(DomainError):
        uniform_bound_check(op, 2.0, Weight.constant(Grid1D(0.0, 1.0, 8)), trials=4)


def test_uncertified_kernel_skips_maximal_links(heat):
    v = Weight.constant(heat.time_grid)
    heavy = gaussian(0.02, heat.time_grid.h).scaled(2.0)
    op = IntegralOperator(heavy, heat)
    assert not op.certified
    report = uniform_bound_check(op, 2.0, v, trials=8, seed=1)
    assert report.passed
    assert report.maximal_ratio > 1.0


def test_integral_family(heat, time_grid):
    h = time_grid.h
    ops = [IntegralOperator(box(1, h), heat), IntegralOperator(gaussian(0.02, h), heat)]
    family = integral_family(ops, 2.0)
    assert family.members.shape == (2, 32, 32)
    assert family.labels == [k.label for k in (ops[0].kernel, ops[1].kernel)]
    assert family.domain.exponents == [2.0, 2.0]
    other = heat_evolution_family(time_grid, Grid1D(0.0, 1.0, 4), 2.0)
    with pytest.raises(DomainError):
        integral_family([ops[0], IntegralOperator(box(1, h), other)], 2.0)
    with pytest.raises(DomainError):
        integral_family([], 2.0)


def test_structured_certificates(heat, time_grid):
    space = MixedSpace.counting([2], [2.0])
    identity = identity_evolution_family(time_grid, space)
    kernels = [box(1, time_grid.h), gaussian(0.02, time_grid.h)]
    weights = PowerWeightFamily([0.0, 0.3]).weights(time_grid)
    certificates = structured_certificates(identity, kernels, weights, 2.0, 2.0, 1.5)
    assert len(certificates) == 2
    assert all(c.provenance == 'structured' for c in certificates)
    assert certificates[0].value <= certificates[1].value
    assert structured_certificates(heat, kernels, weights, 2.0, 2.0, 1.5) is None
    assert structured_certificates(identity, kernels, weights, 2.0, 2.0, 3.0) is None


def test_experiment_run(time_grid, tmp_path):
    h = time_grid.h
    experiment = TheoremExperiment(
        'small',
        time_grid,
        [box(1, h), gaussian(2 * h**2, h), box(1, h).scaled(3.0)],
        {'kind': 'identity', 'points': 2},
        2.0,
        2.0,
        [1.5, 2.0],
        PowerWeightFamily([0.0, 0.3]),
        SearchOptions(n_max=2, restarts=3, iterations=20),
        chain_trials=4,
    )
    assert experiment.run(str(tmp_path)) is True
    assert len(experiment.results['bounds']) == 4
    assert len(experiment.results['chains']) == 4
    assert len(experiment.results['rademacher']) == 2
    for s, _, lower, upper, kind in experiment.results['bounds']:
        assert kind in ('structured', 'uniform_norm', 'closed_form')
        assert lower <= upper + 1e-7
    for name in ('bounds.csv', 'chain.csv', 'rademacher.csv', 'lower.svg'):
        assert (tmp_path / name).exists()
    with open(tmp_path / 'bounds.csv') as fp:
        content = fp.read()
    assert '# family=identity\n' in content
    assert 's,ap_constant,lower,upper,certificate_kind\n' in content


def test_experiment_configuration():
    dic = {}
    for element in load_configuration(CONFIG):
        process_objects(element, dic)
    experiment = dic['heat']
    assert isinstance(experiment, TheoremExperiment)
    assert experiment.s == [1.25, 2.0, 4.0]
    assert experiment.options.n_max == 4
    assert experiment.weights.exponents == [0.0, 0.3, 0.6]
    assert experiment.time_grid.n_cells == 32
    assert [k.label for k in experiment.kernels] == ['gaussian', 'box', 'causal']


def test_experiment_without_certified_kernels(time_grid, tmp_path):
    experiment = TheoremExperiment(
        'heavy',
        time_grid,
        [box(1, time_grid.h).scaled(3.0)],
        {'kind': 'identity', 'points': 2},
        2.0,
        2.0,
        [2.0],
        PowerWeightFamily([0.0, 0.3]),
    )
    with pytest.raises(DomainError, match='no certified kernels'):
        experiment.run(str(tmp_path))
