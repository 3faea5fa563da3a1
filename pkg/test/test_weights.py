import math

import hypothesis.strategies as st
import pytest
import torch
from hypothesis import given, settings

from weightlab.core.utils import (
    DomainError,
    InfeasibleError,
    JSONParseError,
    conjugate,
    make_generator,
    process_object,
)
from weightlab.lattice.domain import Grid1D
from weightlab.weights import (
    Weight,
    a1_constant,
    ap_constant,
    dual_weight,
    fit_consistency_profile,
    openness_exponent,
    openness_profile,
    parse_weight_spec,
    power_weight,
    random_weight,
)


def brute_force_ap(values, p):
    n = len(values)
    best = 1.0
    for a in range(n):
        for b in range(a, n):
            cells = values[a : b + 1]
            average = sum(cells) / len(cells)
            dual = sum(x ** (-1.0 / (p - 1.0)) for x in cells) / len(cells)
            best = max(best, average * dual ** (p - 1.0))
    return best


def test_ap_constant_two_cells():
    report = ap_constant(Weight(Grid1D(0.0, 1.0, 2), [2.0, 1.0]), 2.0)
    assert report.constant == pytest.approx(1.125)
    assert report.witness_interval == (0, 1)


def test_constant_weight(unit_grid):
    w = Weight.constant(unit_grid, 3.0)
    for p in (1.5, 2.0, 7.0):
        assert ap_constant(w, p).constant == pytest.approx(1.0)
    assert a1_constant(w).constant == pytest.approx(1.0)


def test_weight_must_be_positive(unit_grid):
    with pytest.raises(DomainError):
        Weight(unit_grid, [1.0] * 7 + [0.0])


@pytest.mark.parametrize("p", [1.5, 2.0, 4.0])
def test_ap_constant_matches_brute_force(p, generator):
    w = random_weight(Grid1D(0.0, 1.0, 12), generator)
    expected = brute_force_ap(w.values.tolist(), p)
    assert ap_constant(w, p).constant == pytest.approx(expected, rel=1e-10)
    assert ap_constant(w, p, chunk=5).constant == pytest.approx(expected, rel=1e-10)


@settings(deadline=None, max_examples=30)
@given(
    st.integers(min_value=0, max_value=10**6),
    st.integers(min_value=1, max_value=40),
    st.sampled_from([1.5, 2.0, 3.0]),
)
def test_dual_weight_constant(seed, n, p):
    w = random_weight(Grid1D(0.0, 1.0, n), make_generator(seed))
    expected = ap_constant(w, p).constant ** (1.0 / (p - 1.0))
    dual = ap_constant(dual_weight(w, p), conjugate(p)).constant
    assert dual == pytest.approx(expected, rel=1e-9)


@settings(deadline=None, max_examples=30)
@given(st.integers(min_value=0, max_value=10**6))
def test_ap_constant_is_nonincreasing_in_p(seed):
    w = random_weight(Grid1D(0.0, 1.0, 24), make_generator(seed), log_spread=3.0)
    constants = [ap_constant(w, p).constant for p in (1.5, 2.0, 3.0, 5.0)]
    top = a1_constant(w).constant
    assert constants[0] <= top * (1 + 1e-9)
    for low, high in zip(constants, constants[1:]):
        assert high <= low * (1 + 1e-9)


def test_ap_constant_near_one_uses_log_domain():
    grid = Grid1D(0.0, 1.0, 4)
    w = Weight(grid, [1e-3, 1.0, 1.0, 1e3])
    constant = ap_constant(w, 1.01).constant
    assert math.isfinite(constant)
    assert constant <= a1_constant(w).constant * (1 + 1e-9)


def test_power_weight():
    assert power_weight(1.0, Grid1D(0.0, 1.0, 2)).values.tolist() == [0.5, 1.5]
    w = power_weight(2.0, Grid1D.symmetric(1.0, 2))
    third = torch.full((2,), 1.0 / 3.0, dtype=w.values.dtype)
    assert torch.allclose(w.values, third)
    assert power_weight(0.0, Grid1D.symmetric(1.0, 2)).values.tolist() == [1.0, 1.0]
    with pytest.raises(DomainError):
        power_weight(-1.0, Grid1D.symmetric(1.0, 4))


def test_power_weights_are_ap():
    grid = Grid1D.symmetric(1.0, 64)
    constants = [
        ap_constant(power_weight(a, grid), 2.0).constant for a in (0.3, 0.6)
    ]
    assert 1.0 < constants[0] < constants[1]


def test_openness():
    w = Weight.constant(Grid1D(0.0, 1.0, 8))
    assert openness_exponent(w, 2.0, 1.0) == pytest.approx(1.999)
    w = power_weight(0.5, Grid1D.symmetric(1.0, 32))
    base = ap_constant(w, 2.0).constant
    report = openness_profile(w, 2.0, 1.5 * base)
    assert 1.0 < report.sigma < 2.0
    assert report.constant <= 1.5 * base * (1 + 1e-12)
    with pytest.raises(InfeasibleError):
        openness_profile(w, 2.0, 0.5 * base)


def test_consistency_profile():
    samples = [(1.0, 5.0), (2.0, 3.0), (3.0, 7.0), (2.0, 4.0)]
    profile = fit_consistency_profile(samples)
    assert profile(2.0) == 5.0
    assert profile(0.5) == 5.0
    assert profile(10.0) == 7.0
    assert torch.all(profile.envelope[1:] >= profile.envelope[:-1])
    assert profile.max_decrease() == 1.0
    assert profile.inverse(6.0) == 3.0
    assert profile.inverse(8.0) is None
    assert profile.inverse(1.0) == -math.inf
    with pytest.raises(DomainError):
        fit_consistency_profile([(1.0, 2.0)])


def test_parse_weight_spec():
    assert parse_weight_spec('power:0,0.5') == [0.0, 0.5]
    for bad in ('power:', 'power:a', 'log:1', '0,1'):
        with pytest.raises(DomainError):
            parse_weight_spec(bad)


def test_power_weight_family_json():
    dic = {}
    family = process_object(
        {
            'id': 'v',
            'type': 'PowerWeightFamily',
            'exponents': [0.0, 0.5],
            'grid': {'id': 'g', 'type': 'Grid1D', 'n_cells': 4, 'half_width': 1.0},
        },
        dic,
    )
    assert len(family) == 2
    weights = family.weights()
    assert weights[0].grid == dic['g']
    with pytest.raises(JSONParseError):
        process_object({'id': 'u', 'type': 'PowerWeightFamily', 'exponents': []}, {})
