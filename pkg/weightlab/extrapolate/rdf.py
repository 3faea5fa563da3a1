r"""Rubio de Francia iteration

.. math::
    Ru = \sum_{k=0}^{K} \frac{M^k u}{(2m)^k},

which for :math:`m \ge \|M\|_{B(L^p(w))}` satisfies :math:`u \le Ru`,
:math:`\|Ru\|_{L^p(w)} \le 2\|u\|_{L^p(w)}` and
:math:`M(Ru) \le 2m\,Ru + M^{K+1}u/(2m)^K`.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import torch

from ..core.utils import (
    RELATIVE_TOLERANCE,
    DivergenceError,
    DomainError,
    PropertyCheckError,
    check_exponent,
)
from ..lattice.functions import GridFunction
from ..lattice.norms import weighted_lp_norm
from ..maximal.estimate import maximal_norm_lower
from ..maximal.maximal import maximal_values
from ..weights.consistency import ConsistencyProfile
from ..weights.muckenhoupt import Weight, ap_constant

logger = logging.getLogger(__name__)

SAFETY_FACTOR = 2.0


@dataclass(frozen=True)
class RdFResult:
    """Output of :func:`rdf_iterate` with the finite-series tail."""

    u: GridFunction
    ru: GridFunction
    terms: int
    m_norm_used: float
    tail: GridFunction
    tail_norm: float


def maximal_norm_upper(
    p: float,
    w: Weight,
    envelope: Optional[ConsistencyProfile] = None,
    trials: int = 64,
    seed: int = 0,
) -> float:
    r"""Working estimate :math:`m` of :math:`\|M\|_{B(L^p(w))}`: the larger of
    the search lower bound and the envelope value at :math:`[w]_{A_p}`, times
    a safety factor 2."""
    estimate = maximal_norm_lower(p, w, trials, seed).lower_bound
    if envelope is not None:
        estimate = max(estimate, envelope(ap_constant(w, p).constant))
    return SAFETY_FACTOR * estimate


def rdf_iterate(
    u: GridFunction,
    p: float,
    w: Weight,
    K: int = 16,
    m_norm: Optional[float] = None,
    envelope: Optional[ConsistencyProfile] = None,
    seed: int = 0,
) -> RdFResult:
    r"""Build :math:`Ru` and check its three properties.

    :param GridFunction u: nonnegative, not identically zero
    :param float p: exponent in :math:`(1, \infty)`
    :param Weight w: weight
    :param int K: number of terms after the first
    :param float m_norm: estimate of :math:`\|M\|`, computed by
        :func:`maximal_norm_upper` when None
    :param envelope: consistency envelope of norm estimates
    :param int seed: seed of the norm estimate
    :raises DivergenceError: if the series does not contract
    :raises PropertyCheckError: if one of the properties fails
    """
    p = check_exponent(p)
    if K < 1:
        raise DomainError(f'K must be >= 1, got {K}')
    if bool((u.values < 0).any()):
        raise DomainError('u must be nonnegative')
    if not bool(u.values.any()):
        raise DomainError('u must not vanish identically')
    m = m_norm if m_norm is not None else maximal_norm_upper(p, w, envelope, seed=seed)
    if not m > 0:
        raise DomainError(f'the norm estimate must be positive, got {m}')

    norm_u = float(weighted_lp_norm(u, p, w))
    power = u.values
    total = u.values.clone()
    for k in range(1, K + 1):
        power = maximal_values(power)
        term = power / (2.0 * m) ** k
        if float(weighted_lp_norm(GridFunction(u.grid, term), p, w)) > norm_u:
            raise DivergenceError(
                'rdf-series',
                f'term {k} exceeds the norm of u; increase the norm estimate m={m}',
            )
        total = total + term
    tail_values = maximal_values(power) / (2.0 * m) ** K
    ru = GridFunction(u.grid, total)
    tail = GridFunction(u.grid, tail_values)
    tail_norm = float(weighted_lp_norm(tail, p, w))

    if bool((u.values > total).any()):
        raise PropertyCheckError('rdf-majorant', 'u <= Ru fails')
    norm_ru = float(weighted_lp_norm(ru, p, w))
    if norm_ru > 2.0 * norm_u * (1.0 + RELATIVE_TOLERANCE):
        raise DivergenceError(
            'rdf-norm',
            f'|Ru| = {norm_ru} exceeds 2|u| = {2.0 * norm_u}; increase m={m}',
        )
    excess = maximal_values(total) - (2.0 * m * total + tail_values)
    scale = float(total.max())
    if float(excess.max()) > RELATIVE_TOLERANCE * scale:
        cell = int(torch.argmax(excess))
        raise PropertyCheckError('rdf-a1', f'M(Ru) > 2m Ru + tail at cell {cell}')
    logger.debug('rdf K=%d m=%s tail=%s', K, m, tail_norm)
    return RdFResult(u, ru, K, m, tail, tail_norm)
