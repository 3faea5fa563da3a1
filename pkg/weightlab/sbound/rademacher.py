"""Lower estimates of R-bounds from Rademacher averages."""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Optional

import torch
from torch import Tensor

from ..core.utils import DTYPE, DomainError, make_generator
from ..lattice.domain import MixedSpace
from ..lattice.norms import mixed_norm
from .family import OperatorFamily
from .search import SearchOptions, TupleWitness, search_tuples

logger = logging.getLogger(__name__)

# largest tuple length whose sign patterns are enumerated
EXACT_SIGNS = 12

MONTE_CARLO_SIGNS = 256


@dataclass(frozen=True)
class RademacherEstimate:
    """Largest ratio of Rademacher averages found, with its witness."""

    value: float
    witness: TupleWitness
    seed: int


def sign_patterns(n: int, generator: Optional[torch.Generator] = None) -> Tensor:
    r"""Sign patterns with :math:`\varepsilon_1 = +1`.

    All :math:`2^{n-1}` of them for ``n <= 12`` (flipping every sign leaves
    the norms unchanged), seeded random draws above.

    :example:
    >>> sign_patterns(2).tolist()
    [[1.0, 1.0], [1.0, -1.0]]
    """
    if n <= EXACT_SIGNS:
        rest = list(itertools.product((1.0, -1.0), repeat=n - 1))
        return torch.tensor([(1.0,) + signs for signs in rest], dtype=DTYPE)
    if generator is None:
        raise DomainError('random sign patterns need a generator')
    draws = torch.randint(2, (MONTE_CARLO_SIGNS, n), generator=generator)
    return (2.0 * draws - 1.0).to(DTYPE)


def rademacher_average(values: Tensor, signs: Tensor, space: MixedSpace) -> Tensor:
    r""":math:`(\mathbb{E}\|\sum_n \varepsilon_n v_n\|^2)^{1/2}` over the
    given patterns."""
    sums = torch.einsum('pn,n...->p...', signs, values)
    return (mixed_norm(sums, space) ** 2).mean().sqrt()


def rademacher_bound_estimate(
    family: OperatorFamily,
    trials: int,
    n_max: int = 6,
    seed: int = 0,
    options: Optional[SearchOptions] = None,
) -> RademacherEstimate:
    r"""Lower estimate of the R-bound of ``family``.

    Maximizes :math:`(\mathbb{E}\|\sum \varepsilon_n T_{j_n} x_n\|_Y^2)^{1/2}
    / (\mathbb{E}\|\sum \varepsilon_n x_n\|_X^2)^{1/2}` with the tuple search
    of :func:`~weightlab.sbound.search.estimate_ls_bound`.

    :param OperatorFamily family: family
    :param int trials: number of restarts
    :param int n_max: largest tuple length
    :param int seed: seed of the search and of random sign patterns
    :param SearchOptions options: remaining search knobs
    """
    if trials < 1:
        raise DomainError(f'trials must be >= 1, got {trials}')
    options = (options or SearchOptions()).with_budget(n_max, trials)
    generator = make_generator(seed + 1)
    patterns = {n: sign_patterns(n, generator) for n in range(1, options.n_max + 1)}

    def objective(assignment, xs):
        signs = patterns[len(assignment)]
        numerator = rademacher_average(
            family.apply_tuple(assignment, xs), signs, family.codomain
        )
        return numerator / rademacher_average(xs, signs, family.domain)

    value, witness = search_tuples(
        objective, family.n_members, family.domain.shape, options, seed
    )
    logger.info('Rademacher lower estimate: %s', value)
    return RademacherEstimate(max(value, 0.0), witness, seed)
