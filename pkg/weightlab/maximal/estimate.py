"""Seeded lower estimates of the norm of M on weighted spaces."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List

import torch
from torch import Tensor

from ..core.utils import DTYPE, DomainError, check_exponent, make_generator
from ..lattice.functions import GridFunction
from ..lattice.norms import reduce_last
from ..weights.muckenhoupt import Weight
from .maximal import maximal_values

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MaximalNormEstimate:
    r"""Lower bound on :math:`\|M\|_{B(L^p(w))}` with the function attaining
    it."""

    p: float
    weight: Weight
    lower_bound: float
    witness: GridFunction
    trials: int
    seed: int


def maximal_ratio(values: Tensor, masses: Tensor, p: float) -> float:
    r"""Return :math:`\|Mf\|_{L^p(\mu)} / \|f\|_{L^p(\mu)}` for cell masses
    :math:`\mu`."""
    denominator = reduce_last(values, masses, p)
    if float(denominator) == 0.0:
        return 0.0
    return float(reduce_last(maximal_values(values), masses, p) / denominator)


def _candidates(w: Weight, p: float) -> List[Tensor]:
    n = w.grid.n_cells
    sigma = w.values ** (-1.0 / (p - 1.0))
    out = [torch.ones(n, dtype=DTYPE)]
    length = 1
    while length <= n:
        for start in range(0, n - length + 1, max(1, length // 2)):
            bump = torch.zeros(n, dtype=DTYPE)
            bump[start : start + length] = sigma[start : start + length]
            out.append(bump)
        length *= 2
    return out


def _random_draw(
    kind: int, w: Weight, p: float, generator: torch.Generator
) -> Tensor:
    n = w.grid.n_cells
    if kind == 0:
        return torch.rand(n, generator=generator, dtype=DTYPE)
    if kind == 1:
        support = torch.rand(n, generator=generator, dtype=DTYPE) < 0.1
        magnitudes = torch.empty(n, dtype=DTYPE).exponential_(generator=generator)
        values = torch.where(support, magnitudes**2, torch.zeros_like(magnitudes))
        if not bool(values.any()):
            values[int(torch.randint(n, (1,), generator=generator))] = 1.0
        return values
    a, b = sorted(torch.randint(n, (2,), generator=generator).tolist())
    values = torch.zeros(n, dtype=DTYPE)
    values[a : b + 1] = w.values[a : b + 1] ** (-1.0 / (p - 1.0))
    return values


def maximal_norm_lower(
    p: float,
    w: Weight,
    trials: int,
    seed: int,
    climb_steps: int = 200,
) -> MaximalNormEstimate:
    r"""Largest ratio :math:`\|Mf\|_{L^p(w)} / \|f\|_{L^p(w)}` found.

    The search starts from the constant function (ratio 1), dual-weight bumps
    :math:`w^{-1/(p-1)}\chi_Q` and ``trials`` seeded random nonnegative draws,
    then hill-climbs from the best one by single-cell perturbations accepted
    only on strict improvement.

    :param float p: exponent in :math:`(1, \infty)`
    :param Weight w: weight
    :param int trials: number of random draws
    :param int seed: seed of the draws and of the climb
    :param int climb_steps: number of perturbations tried
    :rtype: MaximalNormEstimate
    """
    p = check_exponent(p)
    if trials < 1:
        raise DomainError(f'trials must be >= 1, got {trials}')
    generator = make_generator(seed)
    masses = w.grid.h * w.values
    n = w.grid.n_cells

    best_values = None
    best = -1.0
    pool = _candidates(w, p) + [
        _random_draw(i % 3, w, p, generator) for i in range(trials)
    ]
    for values in pool:
        ratio = maximal_ratio(values, masses, p)
        if ratio > best:
            best, best_values = ratio, values

    current = best_values.clone()
    for _ in range(climb_steps):
        cell = int(torch.randint(n, (1,), generator=generator))
        step = float(torch.rand(1, generator=generator, dtype=DTYPE))
        proposal = current.clone()
        if step < 0.5:
            proposal[cell] *= 2.0 * step
        else:
            proposal[cell] += (2.0 * step - 1.0) * float(current.max())
        if not bool(proposal.any()):
            continue
        ratio = maximal_ratio(proposal, masses, p)
        if ratio > best:
            best, current = ratio, proposal
    logger.debug('maximal norm lower bound p=%s: %s', p, best)
    return MaximalNormEstimate(
        p, w, best, GridFunction(w.grid, current), trials, seed
    )
