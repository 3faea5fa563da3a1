"""Generators of (f, g) pairs for extrapolation experiments.

Samples are tensors of shape ``(n_samples, n_cells, *space.shape)``; the
maximal operator always acts along the grid axis.
"""

from __future__ import annotations

import abc
from typing import Tuple

import torch
from torch import Tensor

from ..core.utils import DTYPE, DomainError, make_generator
from ..maximal.maximal import maximal_values


class PairGenerator(abc.ABC):
    """Maps sampled functions ``g`` to pairs ``(f, g)``."""

    name = 'pairs'

    @abc.abstractmethod
    def pairs(self, g: Tensor) -> Tuple[Tensor, Tensor]:
        ...


def grid_maximal(values: Tensor) -> Tensor:
    """Maximal function along dimension 1 of a batch of samples."""
    return maximal_values(values.movedim(1, -1)).movedim(-1, 1)


class MaximalPairs(PairGenerator):
    r"""Pairs :math:`(\tilde M g, g)`."""

    name = 'maximal'

    def pairs(self, g: Tensor) -> Tuple[Tensor, Tensor]:
        return grid_maximal(g), g


class IdentityPairs(PairGenerator):
    """Pairs ``(g, g)``."""

    name = 'identity'

    def pairs(self, g: Tensor) -> Tuple[Tensor, Tensor]:
        return g, g


class ReversedPairs(PairGenerator):
    r"""Pairs :math:`(g, \tilde M g)`."""

    name = 'reversed'

    def pairs(self, g: Tensor) -> Tuple[Tensor, Tensor]:
        return g, grid_maximal(g)


PAIR_GENERATORS = {
    cls.name: cls for cls in (MaximalPairs, IdentityPairs, ReversedPairs)
}


def pair_generator(name: str) -> PairGenerator:
    if name not in PAIR_GENERATORS:
        raise DomainError(
            f'unknown pair generator `{name}\' '
            f'(expected one of {", ".join(sorted(PAIR_GENERATORS))})'
        )
    return PAIR_GENERATORS[name]()


def sample_functions(n_samples: int, shape: Tuple[int, ...], seed: int) -> Tensor:
    """Seeded nonnegative samples cycling through uniform, sparse
    heavy-tailed and interval-indicator draws."""
    if n_samples < 1:
        raise DomainError(f'at least one sample is required, got {n_samples}')
    generator = make_generator(seed)
    n = shape[0]
    samples = []
    for index in range(n_samples):
        kind = index % 3
        if kind == 0:
            values = torch.rand(shape, generator=generator, dtype=DTYPE)
        elif kind == 1:
            support = torch.rand(shape, generator=generator, dtype=DTYPE) < 0.1
            magnitudes = torch.rand(shape, generator=generator, dtype=DTYPE)
            values = torch.where(
                support,
                magnitudes.clamp(min=1e-3) ** -1,
                torch.zeros(shape, dtype=DTYPE),
            )
        else:
            a, b = sorted(torch.randint(n, (2,), generator=generator).tolist())
            values = torch.zeros(shape, dtype=DTYPE)
            values[a : b + 1] = 1.0 + torch.rand(
                (b + 1 - a,) + tuple(shape[1:]), generator=generator, dtype=DTYPE
            )
        if not bool(values.any()):
            values = torch.ones(shape, dtype=DTYPE)
        samples.append(values)
    return torch.stack(samples)
