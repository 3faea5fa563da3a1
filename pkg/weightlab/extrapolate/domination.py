r"""Dominating weights of operator families on :math:`L^q(\mu)`.

A weight :math:`U` dominates :math:`u` for :math:`\{T_j\}` and :math:`s < q` if

.. math::
    \int |T_j\varphi|^s u\,d\mu \le \int |\varphi|^s U\,d\mu
    \quad\text{and}\quad \|U\|_r \le \|u\|_r, \qquad r = \frac{q}{q-s}.

For multiplication and weighted composition families the least such
:math:`U` is :math:`\max_j B_j u` divided by :math:`R^s(T)^s`.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import torch
from torch import Tensor

from ..core.utils import (
    DTYPE,
    RELATIVE_TOLERANCE,
    DomainError,
    as_tensor,
    check_exponent,
    make_generator,
)
from ..lattice.norms import reduce_last
from ..sbound.family import GENERIC, OperatorFamily
from ..sbound.structured import (
    domination_operators,
    exact_ls_bound_structured,
    structured_space,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DominationVerdict:
    """Outcome of :func:`verify_domination`.

    ``worst_gap`` is the largest value of left minus right side over the
    tested functions; ``counterexample`` and ``member`` locate the first
    violation.
    """

    passed: bool
    norm_ok: bool
    worst_gap: float
    counterexample: Optional[Tensor]
    member: Optional[int]


def domination_exponent(q: float, s: float) -> float:
    """Exponent :math:`r = q/(q-s)`, 1 at :math:`q = \\infty`.

    :example:
    >>> domination_exponent(4.0, 2.0)
    2.0
    """
    if not s < q:
        raise DomainError(f'domination needs s < q, got s={s}, q={q}')
    return 1.0 if math.isinf(q) else q / (q - s)


def _measure(family: OperatorFamily) -> Tuple[Tensor, float]:
    if family.structure != GENERIC:
        return structured_space(family)
    space = family.domain
    if family.codomain != space:
        raise DomainError('domination needs a family acting within one space')
    if space.n_axes == 0:
        return torch.ones(1, dtype=DTYPE), 2.0
    if not space.is_flat:
        raise DomainError('domination needs a space with one common exponent')
    return space.masses().reshape(-1), space.exponents[0]


def _flat_weight(u: Union[Tensor, list], size: int, name: str) -> Tensor:
    u = as_tensor(u).reshape(-1)
    if u.shape[0] != size:
        raise DomainError(f'{name} has {u.shape[0]} entries, expected {size}')
    if bool((u < 0).any()):
        raise DomainError(f'{name} must be nonnegative')
    return u


def _raw_domination(family: OperatorFamily, s: float, u: Tensor) -> Tensor:
    return torch.einsum('jkl,l->jk', domination_operators(family, s), u).amax(0)


def dominating_weight_structured(
    u: Union[Tensor, list], family: OperatorFamily, s: float, seed: int = 0
) -> Tensor:
    r"""Least dominating weight of a structured family, normalized by
    :math:`R^s(T)^s`.

    :param u: nonnegative weight on the family's space
    :param OperatorFamily family: multiplication or weighted composition
        family on :math:`L^q(\mu)`
    :param float s: exponent in :math:`[1, q)`
    :return: :math:`U` with the shape of ``family.domain``

    :example:
    >>> from weightlab.lattice import MixedSpace
    >>> space = MixedSpace.counting([3], [3])
    >>> members = torch.eye(3, dtype=torch.float64)
    >>> family = OperatorFamily(members, space, structure='multiplication')
    >>> dominating_weight_structured([1.0, 2.0, 3.0], family, 2.0).tolist()
    [1.0, 2.0, 3.0]
    """
    if family.structure == GENERIC:
        raise DomainError(
            'dominating weights are constructed for multiplication and '
            'weighted_composition families only'
        )
    mu, q = structured_space(family)
    s = check_exponent(s, 's', inclusive=True)
    domination_exponent(q, s)
    u = _flat_weight(u, mu.shape[0], 'u')
    raw = _raw_domination(family, s, u)
    normalization = exact_ls_bound_structured(family, s, seed) ** s
    if normalization > 0:
        raw = raw / normalization
    return raw.reshape(family.domain.shape)


def domination_constant(
    family: OperatorFamily, s: float, u: Union[Tensor, list]
) -> float:
    r"""Return :math:`\|\max_j B_j u\|_r / \|u\|_r`; its supremum over
    :math:`u` is :math:`R^s(T)^s`."""
    mu, q = structured_space(family)
    s = check_exponent(s, 's', inclusive=True)
    r = domination_exponent(q, s)
    u = _flat_weight(u, mu.shape[0], 'u')
    norm_u = float(reduce_last(u, mu, r))
    if norm_u == 0.0:
        raise DomainError('u must not vanish identically')
    return float(reduce_last(_raw_domination(family, s, u), mu, r)) / norm_u


def _test_functions(dimension: int, trials: int, seed: int) -> Tensor:
    generator = make_generator(seed)
    draws = []
    for index in range(trials):
        if index % 2 == 0:
            phi = torch.randn(dimension, generator=generator, dtype=DTYPE)
        else:
            support = torch.rand(dimension, generator=generator, dtype=DTYPE) < 0.3
            magnitude = torch.rand(dimension, generator=generator, dtype=DTYPE)
            phi = torch.where(
                support,
                magnitude.clamp(min=1e-3) ** -1,
                torch.zeros(dimension, dtype=DTYPE),
            )
        draws.append(phi)
    return torch.cat([torch.eye(dimension, dtype=DTYPE), torch.stack(draws)])


def verify_domination(
    U: Union[Tensor, list],
    u: Union[Tensor, list],
    family: OperatorFamily,
    s: float,
    trials: int = 1000,
    seed: int = 0,
    normalization: Optional[float] = None,
) -> DominationVerdict:
    r"""Check both domination inequalities on basis vectors and seeded random
    test functions.

    :param U: candidate dominating weight
    :param u: weight to be dominated
    :param OperatorFamily family: family acting on a flat space
    :param float s: exponent in :math:`[1, q)`
    :param int trials: number of random test functions
    :param int seed: seed of the test functions
    :param float normalization: constant :math:`N` in
        :math:`\int|T_j\varphi|^s u \le N\int|\varphi|^s U`; defaults to
        :math:`R^s(T)^s` for structured families and 1 otherwise
    """
    if trials < 1:
        raise DomainError(f'trials must be >= 1, got {trials}')
    mu, q = _measure(family)
    s = check_exponent(s, 's', inclusive=True)
    r = domination_exponent(q, s)
    U = _flat_weight(U, mu.shape[0], 'U')
    u = _flat_weight(u, mu.shape[0], 'u')
    if normalization is None:
        normalization = (
            1.0
            if family.structure == GENERIC
            else exact_ls_bound_structured(family, s) ** s
        )

    norm_U = float(reduce_last(U, mu, r))
    norm_u = float(reduce_last(u, mu, r))
    norm_ok = norm_U <= norm_u * (1.0 + RELATIVE_TOLERANCE)

    phis = _test_functions(mu.shape[0], trials, seed)
    images = torch.einsum('jkl,pl->pjk', family.members, phis).abs() ** s
    lhs = (images * (u * mu)).sum(-1)
    rhs = normalization * (phis.abs() ** s * (U * mu)).sum(-1)
    gaps = lhs - rhs.unsqueeze(-1)
    scale = torch.maximum(lhs, rhs.unsqueeze(-1)).clamp(min=1e-300)
    violations = gaps > RELATIVE_TOLERANCE * scale

    counterexample, member = None, None
    if bool(violations.any()):
        index = int(torch.nonzero(violations)[0, 0])
        member = int(torch.nonzero(violations[index])[0])
        counterexample = phis[index].reshape(family.domain.shape)
        logger.info('domination fails for member %d on test function %d', member, index)
    passed = norm_ok and counterexample is None
    return DominationVerdict(
        passed, norm_ok, float(gaps.max()), counterexample, member
    )
