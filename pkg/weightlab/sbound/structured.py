r"""Exact :math:`\ell^s`-bounds of multiplication and weighted composition
families.

For :math:`T_j\varphi(i) = m_j(i)\varphi(\sigma_j(i))` on :math:`L^q(\mu)` and
:math:`s < q` the least dominating weight is explicit, which gives

.. math::
    R^s(T)^s = \sup_{u \ge 0,\ \|u\|_r = 1} \|\max_j B_j u\|_r,
    \qquad r = \frac{q}{q - s},

with :math:`B_j = M^{-1}|T_j|^{s\top}M` the :math:`\mu`-adjoint of the
entrywise power :math:`|T_j|^s`. The supremum of this convex function is
found with a multi-start power iteration and, in dimension at most 3,
confirmed on a grid of the positive part of the unit sphere.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Optional

import torch
from torch import Tensor

from ..core.utils import (
    DTYPE,
    DomainError,
    check_exponent,
    conjugate,
    make_generator,
)
from ..lattice.domain import MixedSpace
from ..lattice.norms import reduce_last
from .family import (
    GENERIC,
    MULTIPLICATION,
    WEIGHTED_COMPOSITION,
    OperatorFamily,
    adjoint_family,
)

logger = logging.getLogger(__name__)

GRID_DIMENSION = 3

GRID_POINTS = 40


@dataclass(frozen=True)
class StructuredExtremal:
    r"""Exact :math:`R^s(T)` with the maximizing :math:`u`; ``grid_value`` is
    the grid confirmation (None above dimension 3)."""

    value: float
    maximizer: Optional[Tensor]
    grid_value: Optional[float]


def structured_space(family: OperatorFamily):
    if family.structure == GENERIC:
        raise DomainError(
            'exact bounds need a multiplication or weighted_composition family'
        )
    space = family.domain
    if space.n_axes == 0:
        return torch.ones(1, dtype=DTYPE), 2.0
    if not space.is_flat:
        raise DomainError('exact bounds need a space with one common exponent')
    return space.masses().reshape(-1), space.exponents[0]


def domination_operators(family: OperatorFamily, s: float) -> Tensor:
    r"""Matrices :math:`B_j = M^{-1}|T_j|^{s\top}M` with
    :math:`\int |T_j\varphi|^s u\,d\mu = \int |\varphi|^s B_j u\,d\mu`."""
    mu, _ = structured_space(family)
    powered = family.members.abs() ** s
    return powered.transpose(-1, -2) * mu / mu.unsqueeze(-1)


def _norm(values: Tensor, mu: Tensor, r: float) -> Tensor:
    return reduce_last(values, mu, r)


def _envelope(operators: Tensor, u: Tensor) -> Tensor:
    return torch.einsum('jkl,...l->...jk', operators, u).amax(-2)


def _power_iteration(
    operators: Tensor, mu: Tensor, r: float, u: Tensor, iterations: int, tol: float
):
    u = u / _norm(u, mu, r)
    value = float(_norm(_envelope(operators, u), mu, r))
    for _ in range(iterations):
        images = torch.einsum('jkl,l->jk', operators, u)
        selected = images.argmax(0)
        v = images.amax(0)
        if not float(v.max()) > 0:
            break
        rows = operators[selected, torch.arange(v.shape[0])]
        c = rows.transpose(0, 1) @ (mu * v ** (r - 1.0))
        if not float(c.max()) > 0:
            break
        candidate = (c / mu) ** (1.0 / (r - 1.0))
        candidate = candidate / _norm(candidate, mu, r)
        new_value = float(_norm(_envelope(operators, candidate), mu, r))
        if new_value <= value * (1.0 + tol):
            if new_value > value:
                u, value = candidate, new_value
            break
        u, value = candidate, new_value
    return value, u


def _grid_value(operators: Tensor, mu: Tensor, r: float) -> float:
    dimension = mu.shape[0]
    levels = torch.linspace(0.0, 1.0, GRID_POINTS + 1, dtype=DTYPE)
    points = torch.tensor(
        list(itertools.product(levels.tolist(), repeat=dimension)), dtype=DTYPE
    )[1:]
    points = points / _norm(points, mu, r).unsqueeze(-1)
    return float(_norm(_envelope(operators, points), mu, r).max())


def _domination_sup(
    operators: Tensor,
    mu: Tensor,
    r: float,
    seed: int,
    random_starts: int,
    iterations: int = 500,
    tol: float = 1e-13,
):
    dimension = mu.shape[0]
    generator = make_generator(seed)
    starts = [torch.ones(dimension, dtype=DTYPE)]
    starts += list(torch.eye(dimension, dtype=DTYPE))
    starts += [
        torch.rand(dimension, generator=generator, dtype=DTYPE)
        for _ in range(random_starts)
    ]
    best, maximizer = -1.0, None
    for u in starts:
        value, u = _power_iteration(operators, mu, r, u, iterations, tol)
        if value > best:
            best, maximizer = value, u
    grid = _grid_value(operators, mu, r) if dimension <= GRID_DIMENSION else None
    return best, maximizer, grid


def structured_extremal(
    family: OperatorFamily, s: float, seed: int = 0, random_starts: int = 32
) -> StructuredExtremal:
    r"""Exact :math:`R^s(T)` for :math:`1 \le s < q` with its maximizer.

    :raises DomainError: for generic families or :math:`s \ge q`
    """
    mu, q = structured_space(family)
    s = check_exponent(s, 's', allow_inf=True, inclusive=True)
    if not s < q:
        raise DomainError(f'exact bounds need s < q, got s={s}, q={q}')
    if family.structure == MULTIPLICATION:
        value = float(family.members.abs().amax())
        return StructuredExtremal(value, None, None)
    operators = domination_operators(family, s)
    if math.isinf(q):
        # r = 1: a convex function on the simplex peaks at a vertex
        vertices = torch.diag(1.0 / mu)
        values = _norm(_envelope(operators, vertices), mu, 1.0)
        best = int(values.argmax())
        return StructuredExtremal(
            float(values[best]) ** (1.0 / s), vertices[best], None
        )
    r = q / (q - s)
    value, maximizer, grid = _domination_sup(operators, mu, r, seed, random_starts)
    if grid is not None and grid > value:
        logger.debug('grid value %s exceeds power iteration %s', grid, value)
        value = grid
    return StructuredExtremal(
        max(value, 0.0) ** (1.0 / s),
        maximizer,
        None if grid is None else max(grid, 0.0) ** (1.0 / s),
    )


def exact_ls_bound_structured(family: OperatorFamily, s: float, seed: int = 0) -> float:
    r"""Exact :math:`R^s(T)` of a structured family on :math:`L^q(\mu)`,
    :math:`1 \le s < q`; see :func:`structured_extremal`.

    :example:
    >>> from weightlab.lattice import MixedSpace
    >>> space = MixedSpace.counting([2], [2])
    >>> members = torch.stack([torch.eye(2), 2 * torch.eye(2)]).double()
    >>> family = OperatorFamily(members, space, structure='multiplication')
    >>> exact_ls_bound_structured(family, 1.5)
    2.0
    """
    return structured_extremal(family, s, seed).value


def member_norms_structured(family: OperatorFamily) -> float:
    r""":math:`\max_j \|T_j\|_{L^q(\mu)}` in closed form."""
    mu, q = structured_space(family)
    a = family.members.abs()
    if math.isinf(q):
        return float(a.amax())
    # column k holds the entry m_j(i) with sigma_j(i) = k
    scaled = (a**q * mu.unsqueeze(-1)).sum(-2) / mu
    return float(scaled.amax()) ** (1.0 / q)


def structured_ls_bound(family: OperatorFamily, s: float, seed: int = 0) -> float:
    r"""Exact :math:`R^s(T)` for every :math:`s \in [1, \infty]`.

    Uses :func:`exact_ls_bound_structured` below :math:`q`, the member norms
    at :math:`s = q` and :math:`R^s(T) = R^{s'}(T^*)` above :math:`q`.
    """
    _, q = structured_space(family)
    s = check_exponent(s, 's', allow_inf=True, inclusive=True)
    if family.structure == MULTIPLICATION:
        return float(family.members.abs().amax())
    if s < q:
        return exact_ls_bound_structured(family, s, seed)
    if s == q:
        return member_norms_structured(family)
    return exact_ls_bound_structured(adjoint_family(family), conjugate(s), seed)


def random_structured_family(
    space: MixedSpace,
    n_members: int,
    structure: str,
    generator: torch.Generator,
    scale: float = 1.0,
) -> OperatorFamily:
    r"""Seeded family of multipliers :math:`m_j` in :math:`[-\mathrm{scale},
    \mathrm{scale}]`, composed with random permutations :math:`\sigma_j` for
    weighted composition families."""
    if structure not in (MULTIPLICATION, WEIGHTED_COMPOSITION):
        raise DomainError(f'no random families of structure `{structure}\'')
    if n_members < 1:
        raise DomainError(f'n_members must be >= 1, got {n_members}')
    dim = space.dim
    multipliers = scale * (
        2.0 * torch.rand((n_members, dim), generator=generator, dtype=DTYPE) - 1.0
    )
    if structure == MULTIPLICATION:
        members = torch.diag_embed(multipliers)
    else:
        members = torch.zeros((n_members, dim, dim), dtype=DTYPE)
        rows = torch.arange(dim)
        for j in range(n_members):
            sigma = torch.randperm(dim, generator=generator)
            members[j, rows, sigma] = multipliers[j]
    return OperatorFamily(members, space, structure=structure)
