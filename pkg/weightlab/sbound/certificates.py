"""Upper certificates for the ell^s-bound."""

from __future__ import annotations

import logging
import math
from typing import List, Optional

from ..core.utils import DomainError, check_exponent, conjugate
from .family import GENERIC, OperatorFamily, adjoint_family, uniform_norm
from .search import UpperCertificate
from .structured import structured_ls_bound

logger = logging.getLogger(__name__)

RECIPROCAL = 'reciprocal'
LINEAR = 'linear'


def _inverse(s: float) -> float:
    return 0.0 if math.isinf(s) else 1.0 / s


def interpolation_theta(
    s0: float, s1: float, s: float, rule: str = RECIPROCAL
) -> float:
    if rule == RECIPROCAL:
        if s0 == s1:
            return 0.0
        return (_inverse(s0) - _inverse(s)) / (_inverse(s0) - _inverse(s1))
    if rule == LINEAR:
        if s == s0:
            return 0.0
        if math.isinf(s1):
            raise DomainError('the linear rule needs a finite s1')
        return (s - s0) / (s1 - s0)
    raise DomainError(f'unknown interpolation rule `{rule}\'')


def interpolation_certificate(
    r_s0: float, r_s1: float, s0: float, s1: float, s: float, rule: str = RECIPROCAL
) -> float:
    r"""Return :math:`R^{s_0}(T)^{1-\theta} R^{s_1}(T)^{\theta}`.

    With the ``reciprocal`` rule :math:`\theta` solves
    :math:`1/s = (1-\theta)/s_0 + \theta/s_1`, which makes the value an
    upper bound of :math:`R^s(T)`; the ``linear`` rule uses
    :math:`\theta = (s - s_0)/(s_1 - s_0)`.

    :example:
    >>> round(interpolation_certificate(2.0, 8.0, 1.0, float('inf'), 2.0), 12)
    4.0
    >>> round(interpolation_certificate(2.0, 8.0, 1.0, 3.0, 2.0, rule='linear'), 12)
    4.0
    """
    s0 = check_exponent(s0, 's0', allow_inf=True, inclusive=True)
    s1 = check_exponent(s1, 's1', allow_inf=True, inclusive=True)
    s = check_exponent(s, 's', allow_inf=True, inclusive=True)
    if not s0 <= s <= s1:
        raise DomainError(f's={s} is outside [{s0}, {s1}]')
    if r_s0 < 0 or r_s1 < 0:
        raise DomainError('bounds must be nonnegative')
    theta = interpolation_theta(s0, s1, s, rule)
    if theta == 0.0:
        return float(r_s0)
    if theta == 1.0:
        return float(r_s1)
    return float(r_s0 ** (1.0 - theta) * r_s1**theta)


def automatic_certificates(family: OperatorFamily, s: float) -> List[UpperCertificate]:
    """Certificates available from the family alone."""
    certificates = []
    if family.structure != GENERIC:
        try:
            certificates.append(
                UpperCertificate(structured_ls_bound(family, s), 'closed_form')
            )
        except DomainError as e:
            logger.debug('no closed form at s=%s: %s', s, e)
    scalar = family.domain.n_axes == 0 and family.codomain.n_axes == 0
    exponents = set(family.domain.exponents) | set(family.codomain.exponents)
    if scalar or exponents == {s}:
        bound = uniform_norm(family)
        if bound is not None:
            certificates.append(UpperCertificate(bound, 'uniform_norm'))
    return certificates


def duality_certificate(family: OperatorFamily, s: float) -> Optional[UpperCertificate]:
    r"""Upper bound of :math:`R^s(T)` obtained as a certificate of
    :math:`R^{s'}(T^*)` for the adjoint family."""
    s = check_exponent(s, 's', allow_inf=True, inclusive=True)
    try:
        adjoint = adjoint_family(family)
    except DomainError:
        return None
    candidates = automatic_certificates(adjoint, conjugate(s))
    if len(candidates) == 0:
        return None
    return UpperCertificate(min(c.value for c in candidates), 'duality')
