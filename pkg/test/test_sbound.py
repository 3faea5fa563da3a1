import math

import pytest
import torch

from weightlab.core.utils import (
    DTYPE,
    DomainError,
    PropertyCheckError,
    make_generator,
    process_object,
)
from weightlab.lattice.domain import MeasuredAxis, MixedSpace
from weightlab.sbound import (
    MULTIPLICATION,
    WEIGHTED_COMPOSITION,
    OperatorFamily,
    SearchOptions,
    UpperCertificate,
    adjoint_family,
    automatic_certificates,
    duality_certificate,
    estimate_ls_bound,
    interpolation_certificate,
    ls_ratio,
    operator_norm_bound,
    rademacher_bound_estimate,
    random_structured_family,
    read_family,
    structured_ls_bound,
    write_family,
)
from weightlab.sbound.rademacher import sign_patterns

FAST = SearchOptions(n_max=3, restarts=8, iterations=60)


@pytest.fixture
def plane():
    return MixedSpace.counting([2], [2.0])


@pytest.fixture
def swap_family(plane):
    swap = torch.tensor([[0.0, 1.0], [1.0, 0.0]], dtype=DTYPE)
    members = torch.stack([torch.eye(2, dtype=DTYPE), swap])
    return OperatorFamily(members, plane, structure=WEIGHTED_COMPOSITION)


def test_family_validation(plane):
    with pytest.raises(DomainError):
        OperatorFamily(torch.ones((1, 3, 2), dtype=DTYPE), plane)
    with pytest.raises(DomainError):
        OperatorFamily(torch.ones((1, 2, 2), dtype=DTYPE), plane, structure='banded')
    with pytest.raises(DomainError):
        OperatorFamily(
            torch.ones((1, 2, 2), dtype=DTYPE), plane, structure=MULTIPLICATION
        )
    with pytest.raises(DomainError):
        OperatorFamily(
            torch.ones((1, 2, 2), dtype=DTYPE), plane, structure=WEIGHTED_COMPOSITION
        )
    family = OperatorFamily(torch.eye(2, dtype=DTYPE), plane)
    assert family.n_members == 1
    assert family.labels == ['T0']


def test_ls_ratio(plane):
    family = OperatorFamily(
        torch.diag(torch.tensor([1.0, 2.0], dtype=DTYPE)),
        plane,
        structure=MULTIPLICATION,
    )
    assert ls_ratio([0], [[0.0, 1.0]], 2.0, family) == pytest.approx(2.0)
    assert ls_ratio([0, 0], [[1.0, 0.0], [1.0, 0.0]], 1.0, family) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        ls_ratio([0], [[0.0, 0.0]], 2.0, family)
    with pytest.raises(DomainError):
        ls_ratio([1], [[1.0, 0.0]], 2.0, family)


def test_operator_norm_bound(plane):
    matrix = torch.tensor([[1.0, 2.0], [0.0, 0.0]], dtype=DTYPE)
    one = MixedSpace.counting([2], [1.0])
    top = MixedSpace.counting([2], ['inf'])
    assert operator_norm_bound(matrix, one, one) == pytest.approx(2.0)
    assert operator_norm_bound(matrix, top, top) == pytest.approx(3.0)
    assert operator_norm_bound(matrix, plane, plane) == pytest.approx(math.sqrt(5.0))
    mixed = MixedSpace.counting([2, 2], [2.0, 3.0])
    assert operator_norm_bound(torch.eye(4, dtype=DTYPE), mixed, mixed) is None


def test_adjoint_pairing(generator):
    space = MixedSpace([MeasuredAxis([0.5, 2.0, 1.0])], [3.0])
    members = torch.randn((2, 3, 3), generator=generator, dtype=DTYPE)
    family = OperatorFamily(members, space)
    adjoint = adjoint_family(family)
    assert adjoint.domain.exponents == [1.5]
    assert adjoint.labels == ['T0*', 'T1*']
    mu = space.masses().reshape(-1)
    f = torch.randn(3, generator=generator, dtype=DTYPE)
    g = torch.randn(3, generator=generator, dtype=DTYPE)
    for j in range(2):
        left = (mu * family.apply(j, f) * g).sum()
        right = (mu * f * adjoint.apply(j, g)).sum()
        assert float(left) == pytest.approx(float(right))
    with pytest.raises(DomainError):
        adjoint_family(OperatorFamily(members, MixedSpace.counting([3], ['inf'])))


def test_family_csv(tmp_path, swap_family, plane):
    file_name = str(tmp_path / 'family.csv')
    write_family(swap_family, file_name)
    family = read_family(file_name, plane, structure=WEIGHTED_COMPOSITION)
    assert torch.equal(family.members, swap_family.members)
    (tmp_path / 'bad.csv').write_text('member,row,col,value\n0,5,0,1.0\n')
    with pytest.raises(DomainError, match='out of range'):
        read_family(str(tmp_path / 'bad.csv'), plane)


def test_family_from_json():
    family = process_object(
        {
            'id': 'T',
            'type': 'OperatorFamily',
            'members': [[[1.0, 0.0], [0.0, 3.0]]],
            'domain': {
                'id': 'X',
                'type': 'MixedSpace',
                'sizes': [2],
                'exponents': [2],
            },
            'structure': 'multiplication',
        },
        {},
    )
    assert structured_ls_bound(family, 1.0) == 3.0


def test_interpolation_certificate():
    assert interpolation_certificate(2.0, 8.0, 1.0, 4.0, 1.0) == 2.0
    assert interpolation_certificate(2.0, 8.0, 1.0, 4.0, 4.0) == 8.0
    assert interpolation_certificate(2.0, 2.0, 1.0, 4.0, 2.0) == pytest.approx(2.0)
    with pytest.raises(DomainError):
        interpolation_certificate(2.0, 8.0, 2.0, 4.0, 1.5)
    with pytest.raises(DomainError):
        interpolation_certificate(2.0, 8.0, 1.0, 4.0, 2.0, rule='geometric')


def test_swap_family_exact_bounds(swap_family):
    assert structured_ls_bound(swap_family, 1.0) == pytest.approx(math.sqrt(2.0))
    assert structured_ls_bound(swap_family, 2.0) == pytest.approx(1.0)
    assert structured_ls_bound(swap_family, math.inf) == pytest.approx(math.sqrt(2.0))
    certificate = duality_certificate(swap_family, 3.0)
    assert certificate.provenance == 'duality'
    assert certificate.value == pytest.approx(structured_ls_bound(swap_family, 3.0))


def test_adjoint_is_an_involution(generator):
    space = MixedSpace([MeasuredAxis([0.5, 2.0, 1.0])], [3.0])
    family = random_structured_family(space, 2, WEIGHTED_COMPOSITION, generator)
    twice = adjoint_family(adjoint_family(family))
    torch.testing.assert_close(twice.members, family.members)
    assert twice.domain.exponents == pytest.approx(family.domain.exponents)
    assert twice.codomain.exponents == pytest.approx(family.codomain.exponents)
    assert twice.structure == family.structure


@pytest.mark.parametrize("s", [1.5, 3.0])
def test_adjoint_estimates_agree(s):
    space = MixedSpace.counting([3], [2.0])
    family = random_structured_family(
        space, 2, WEIGHTED_COMPOSITION, make_generator(7)
    )
    options = SearchOptions(n_max=4, restarts=16, iterations=100)
    direct = estimate_ls_bound(family, s, seed=3, options=options).lower
    transported = estimate_ls_bound(
        adjoint_family(family), s / (s - 1.0), seed=3, options=options
    ).lower
    assert abs(direct - transported) / max(direct, transported) <= 0.05


def test_exact_bound_matches_tuple_grid():
    # with one entry per row, |T_j x| = |T_j| |x|, so tuples of length one per
    # member with nonnegative entries reach R^1
    members = torch.tensor(
        [[[1.0, 0.0], [0.0, 0.5]], [[0.0, 0.8], [1.2, 0.0]]], dtype=DTYPE
    )
    family = OperatorFamily(
        members, MixedSpace.counting([2], [2.0]), structure=WEIGHTED_COMPOSITION
    )
    angles = torch.linspace(0.0, math.pi / 2, 61, dtype=DTYPE)
    directions = torch.stack([angles.cos(), angles.sin()], -1).clamp(min=0.0)
    shares = torch.linspace(0.0, 1.0, 61, dtype=DTYPE)
    y0 = shares[:, None, None, None] * directions[None, :, None, :]
    y1 = (1.0 - shares)[:, None, None, None] * directions[None, None, :, :]
    images = y0 @ members[0].T + y1 @ members[1].T
    ratios = images.norm(dim=-1) / (y0 + y1).norm(dim=-1)
    best = int(ratios.argmax())
    exact = structured_ls_bound(family, 1.0)
    assert float(ratios.max()) <= exact * (1.0 + 1e-6)
    assert float(ratios.max()) >= 0.99 * exact
    xs = torch.stack(
        [y.expand(ratios.shape + (2,)).reshape(-1, 2)[best] for y in (y0, y1)]
    )
    assert ls_ratio([0, 1], xs, 1.0, family) == pytest.approx(float(ratios.max()))


def test_multiplication_exact_bound(plane, generator):
    family = random_structured_family(plane, 3, MULTIPLICATION, generator)
    expected = float(family.members.abs().amax())
    for s in (1.0, 1.5, 2.0, math.inf):
        assert structured_ls_bound(family, s) == expected


def test_search_respects_closed_form(swap_family):
    estimate = estimate_ls_bound(swap_family, 1.0, seed=2, options=FAST)
    assert estimate.upper_certificate.provenance == 'closed_form'
    assert 1.0 - 1e-12 <= estimate.lower <= estimate.upper + 1e-7
    witness = estimate.witness
    ratio = ls_ratio(witness.assignment, witness.xs, 1.0, swap_family)
    assert ratio == pytest.approx(estimate.lower)


@pytest.mark.parametrize("structure", [MULTIPLICATION, WEIGHTED_COMPOSITION])
def test_search_reaches_structured_bound(structure):
    space = MixedSpace.counting([3], [2.0])
    family = random_structured_family(space, 2, structure, make_generator(5))
    estimate = estimate_ls_bound(family, 2.0, seed=1, options=FAST)
    assert estimate.upper is not None
    assert estimate.lower >= 0.9 * estimate.upper


def test_search_is_deterministic(swap_family):
    first = estimate_ls_bound(swap_family, 1.5, seed=7, options=FAST)
    second = estimate_ls_bound(swap_family, 1.5, seed=7, options=FAST)
    assert first.lower == second.lower
    assert first.witness.assignment == second.witness.assignment


def test_sandwich_violation_is_reported(plane):
    family = OperatorFamily(torch.eye(2, dtype=DTYPE), plane)
    with pytest.raises(PropertyCheckError) as info:
        estimate_ls_bound(
            family,
            2.0,
            options=FAST,
            certificates=[UpperCertificate(0.5, 'interpolation')],
        )
    assert info.value.item == 'ls-sandwich'


def test_automatic_certificates(plane):
    family = OperatorFamily(2.0 * torch.eye(2, dtype=DTYPE), plane)
    certificates = automatic_certificates(family, 2.0)
    assert [c.provenance for c in certificates] == ['uniform_norm']
    assert certificates[0].value == pytest.approx(2.0)
    assert automatic_certificates(family, 1.5) == []


def test_search_options():
    with pytest.raises(DomainError):
        SearchOptions(n_max=0)
    options = process_object({'id': 'o', 'type': 'SearchOptions', 'restarts': 3}, {})
    assert options.restarts == 3
    assert options.with_budget(n_max=2).n_max == 2


def test_sign_patterns():
    patterns = sign_patterns(3)
    assert patterns.shape == (4, 3)
    assert bool(torch.all(patterns[:, 0] == 1.0))
    with pytest.raises(DomainError):
        sign_patterns(13)
    assert sign_patterns(13, make_generator(0)).shape == (256, 13)


def test_rademacher_estimate(plane):
    identity = OperatorFamily(torch.eye(2, dtype=DTYPE), plane)
    options = SearchOptions(iterations=5)
    estimate = rademacher_bound_estimate(identity, 4, n_max=3, options=options)
    assert estimate.value == pytest.approx(1.0)
    family = OperatorFamily(
        torch.diag(torch.tensor([1.0, 2.0], dtype=DTYPE)),
        plane,
        structure=MULTIPLICATION,
    )
    estimate = rademacher_bound_estimate(family, 6, n_max=2, seed=3)
    assert 1.0 <= estimate.value <= 2.0 + 1e-9
    with pytest.raises(DomainError):
        rademacher_bound_estimate(family, 0)
