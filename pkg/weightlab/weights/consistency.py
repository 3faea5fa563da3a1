"""Nondecreasing upper envelopes of (A_p constant, bound) samples."""

from __future__ import annotations

import math
from typing import Iterable, List, Optional, Tuple

import torch
from torch import Tensor

from ..core.utils import DTYPE, DomainError


class ConsistencyProfile:
    r"""Least nondecreasing step function above a set of samples.

    Evaluated at :math:`x`, the profile returns the envelope value of the
    largest abscissa :math:`\le x`, and the first value left of every sample.

    :param Tensor abscissae: sorted distinct abscissae
    :param Tensor bounds: sample values (merged by max)
    """

    def __init__(self, abscissae: Tensor, bounds: Tensor) -> None:
        self.abscissae = abscissae
        self.bounds = bounds
        self.envelope = torch.cummax(bounds, 0).values

    @property
    def samples(self) -> List[Tuple[float, float]]:
        return list(zip(self.abscissae.tolist(), self.bounds.tolist()))

    def __call__(self, x: float) -> float:
        index = int(
            torch.searchsorted(
                self.abscissae, torch.tensor([float(x)], dtype=DTYPE), right=True
            )
        )
        return float(self.envelope[max(index - 1, 0)])

    def inverse(self, level: float) -> Optional[float]:
        """Smallest abscissa whose envelope value reaches ``level``.

        Returns ``-inf`` when every abscissa qualifies and None when none does.
        """
        if level <= float(self.envelope[0]):
            return -math.inf
        reached = torch.nonzero(self.envelope >= level)
        if reached.numel() == 0:
            return None
        return float(self.abscissae[int(reached[0])])

    def max_decrease(self) -> float:
        """Largest drop of a later sample below an earlier one (0 for
        nondecreasing samples)."""
        return float((self.envelope - self.bounds).max())

    def __len__(self) -> int:
        return self.abscissae.shape[0]

    def __repr__(self) -> str:
        return f'ConsistencyProfile({self.samples})'


def fit_consistency_profile(
    samples: Iterable[Tuple[float, float]]
) -> ConsistencyProfile:
    """Isotonic upper envelope of ``(ap_constant, bound)`` samples.

    Duplicate abscissae are merged by taking the larger bound.

    :example:
    >>> profile = fit_consistency_profile([(1.0, 5.0), (2.0, 3.0)])
    >>> profile(2.0)
    5.0
    """
    samples = list(samples)
    if len(samples) < 2:
        raise DomainError(f'at least 2 samples are required, got {len(samples)}')
    merged = {}
    for x, y in samples:
        x, y = float(x), float(y)
        if math.isnan(x) or math.isnan(y):
            raise DomainError('NaN sample')
        merged[x] = max(y, merged.get(x, -math.inf))
    keys = sorted(merged)
    return ConsistencyProfile(
        torch.tensor(keys, dtype=DTYPE),
        torch.tensor([merged[x] for x in keys], dtype=DTYPE),
    )
