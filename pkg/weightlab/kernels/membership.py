r"""Certificates and counterexamples for the kernel class

.. math::
    K = \{k \in L^1 : |k| * f \le Mf \text{ for all simple } f \ge 0\}.

A kernel is certified when a majorant of :math:`|k|` that is a positive
combination of windows containing the origin has mass at most 1, and refuted
by an explicit nonnegative input violating the domination.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import torch
from torch import Tensor

from ..core.utils import (
    CERTIFICATE_TOLERANCE,
    DTYPE,
    RELATIVE_TOLERANCE,
    make_generator,
)
from ..lattice.domain import Grid1D
from ..lattice.functions import GridFunction
from ..maximal.maximal import maximal_values
from .kernel import Kernel, convolve_values

logger = logging.getLogger(__name__)

CERTIFIED = 'certified'
REFUTED = 'refuted'
UNDETERMINED = 'undetermined'


@dataclass(frozen=True)
class MembershipVerdict:
    """Outcome of :func:`in_class_K`.

    A certified verdict carries the majorant profile and its mass, a refuted
    one the input ``witness`` and the first cell where the domination fails.
    """

    status: str
    certificate: Optional[Tensor] = None
    certificate_mass: Optional[float] = None
    route: Optional[str] = None
    witness: Optional[GridFunction] = None
    violation_cell: Optional[int] = None
    violation: Optional[float] = None

    @property
    def certified(self) -> bool:
        return self.status == CERTIFIED


def least_decreasing_majorant(k: Kernel) -> Tensor:
    r"""Least even profile nonincreasing in :math:`|x|` above :math:`|k|`:
    :math:`\varphi_j = \max_{|o| \ge |j|} |k_o|`.

    :example:
    >>> k = Kernel([0.0, 0.0, 0.0, 0.0, 1.0], 1.0)
    >>> least_decreasing_majorant(k).tolist()
    [1.0, 1.0, 1.0, 1.0, 1.0]
    """
    a = k.values.abs()
    m = k.radius
    folded = torch.maximum(a[m:], a[: m + 1].flip(0))
    tail = folded.flip(0).cummax(0).values.flip(0)
    return torch.cat((tail[1:].flip(0), tail))


def least_unimodal_majorant(k: Kernel) -> Tensor:
    r"""Least profile above :math:`|k|` that is nonincreasing away from the
    origin on each side separately."""
    a = k.values.abs()
    m = k.radius
    right = a[m:].flip(0).cummax(0).values.flip(0)
    left = a[: m + 1].cummax(0).values
    peak = torch.maximum(left[-1:], right[:1])
    return torch.cat((left[:-1], peak, right[1:]))


def domination_gap(k: Kernel, values: Tensor) -> Tensor:
    r"""Pointwise :math:`(|k| * f) - Mf` for nonnegative ``values``."""
    return convolve_values(k.abs(), values) - maximal_values(values)


def _mass_witness(k: Kernel) -> MembershipVerdict:
    m = k.radius
    n = 2 * (2 * m + 1) + 1
    grid = Grid1D(0.0, k.h, n)
    values = torch.ones(n, dtype=DTYPE)
    center = n // 2
    gap = domination_gap(k, values)
    return MembershipVerdict(
        REFUTED,
        witness=GridFunction(grid, values),
        violation_cell=center,
        violation=float(gap[center]),
    )


def _random_simple(n: int, generator: torch.Generator) -> Tensor:
    support = torch.rand(n, generator=generator, dtype=DTYPE) < 0.15
    magnitudes = torch.rand(n, generator=generator, dtype=DTYPE).clamp(min=1e-3)
    values = torch.where(support, magnitudes**-2, torch.zeros_like(magnitudes))
    if not bool(values.any()):
        values[int(torch.randint(n, (1,), generator=generator))] = 1.0
    return values


def in_class_K(
    k: Kernel, refute_trials: int = 1000, seed: int = 0
) -> MembershipVerdict:
    r"""Decide :math:`k \in K` by certificate or counterexample.

    Certification tries the even decreasing majorant and then the unimodal
    one. Refutation first uses the necessary condition
    :math:`\|k\|_1 \le 1` with a wide indicator, then seeded sparse
    heavy-tailed inputs; the first violating trial wins.

    :param Kernel k: kernel
    :param int refute_trials: number of random inputs
    :param int seed: seed of the random inputs
    :rtype: MembershipVerdict
    """
    for route, majorant in (
        ('decreasing', least_decreasing_majorant),
        ('unimodal', least_unimodal_majorant),
    ):
        profile = majorant(k)
        mass = float(k.h * profile.sum())
        if mass <= 1.0 + CERTIFICATE_TOLERANCE:
            logger.debug('%s certified by the %s majorant: %s', k.label, route, mass)
            return MembershipVerdict(CERTIFIED, profile, mass, route)

    if k.l1 > 1.0 + RELATIVE_TOLERANCE:
        logger.debug('%s refuted by its mass %s', k.label, k.l1)
        return _mass_witness(k)

    n = max(2 * (2 * k.radius + 1) + 1, 16)
    grid = Grid1D(0.0, k.h, n)
    generator = make_generator(seed)
    for trial in range(refute_trials):
        values = _random_simple(n, generator)
        gap = domination_gap(k, values)
        violating = torch.nonzero(gap > RELATIVE_TOLERANCE)
        if violating.numel() > 0:
            cell = int(violating[0])
            logger.debug('%s refuted at trial %d', k.label, trial)
            return MembershipVerdict(
                REFUTED,
                witness=GridFunction(grid, values),
                violation_cell=cell,
                violation=float(gap[cell]),
            )
    return MembershipVerdict(UNDETERMINED)
