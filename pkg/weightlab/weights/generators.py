"""Standard test weights."""

from __future__ import annotations

import math
from typing import List, Optional, Sequence

import torch

from ..core.serializable import JSONSerializable
from ..core.utils import DTYPE, DomainError, process_object, register_class, validate
from ..lattice.domain import Grid1D
from .muckenhoupt import Weight


def power_weight(a: float, grid: Grid1D) -> Weight:
    r"""Cell averages of :math:`|x|^a`.

    Averages are taken in closed form from the antiderivative
    :math:`F(x) = \mathrm{sign}(x)|x|^{a+1}/(a+1)`, or
    :math:`\mathrm{sign}(x)\log|x|` when :math:`a = -1`.

    :param float a: exponent
    :param Grid1D grid: grid
    :raises DomainError: if :math:`a \le -1` and a cell touches 0

    :example:
    >>> power_weight(1.0, Grid1D(0.0, 1.0, 2)).values.tolist()
    [0.5, 1.5]
    """
    a = float(a)
    if a == 0.0:
        return Weight.constant(grid)
    edges = grid.edges
    left, right = edges[:-1], edges[1:]
    if a <= -1.0:
        touches = (left <= 0) & (right >= 0)
        if bool(touches.any()):
            cell = int(torch.nonzero(touches)[0])
            raise DomainError(
                f'|x|^{a} is not integrable on cell {cell} which touches 0'
            )
    if a == -1.0:

        def antiderivative(x):
            return torch.sign(x) * torch.log(x.abs())

    else:

        def antiderivative(x):
            return torch.sign(x) * x.abs() ** (a + 1.0) / (a + 1.0)

    values = (antiderivative(right) - antiderivative(left)) / grid.h
    return Weight(grid, values)


def random_weight(
    grid: Grid1D,
    generator: torch.Generator,
    log_spread: float = 2.0,
) -> Weight:
    """Log-uniform weight with values in :math:`[e^{-s}, e^{s}]`."""
    u = torch.rand(grid.n_cells, generator=generator, dtype=DTYPE)
    return Weight(grid, torch.exp(log_spread * (2.0 * u - 1.0)))


def power_weights(exponents: Sequence[float], grid: Grid1D) -> List[Weight]:
    return [power_weight(a, grid) for a in exponents]


def parse_weight_spec(spec: str) -> List[float]:
    """Parse ``power:a1,a2,...`` into the list of exponents.

    :example:
    >>> parse_weight_spec('power:0,0.3,0.6')
    [0.0, 0.3, 0.6]
    """
    kind, sep, values = spec.partition(':')
    if kind.strip() != 'power' or not sep:
        raise DomainError(f'unsupported weight family `{spec}\' (expected power:a,...)')
    try:
        exponents = [float(x) for x in values.split(',') if x.strip() != '']
    except ValueError:
        raise DomainError(f'invalid power exponents in `{spec}\'') from None
    if len(exponents) == 0:
        raise DomainError(f'no exponents in `{spec}\'')
    return exponents


@register_class
class PowerWeightFamily(JSONSerializable):
    """Family of power weights :math:`|x|^a` on a common grid.

    :param exponents: power exponents
    :param grid: grid, supplied later by the experiment when None
    """

    def __init__(self, exponents: Sequence[float], grid: Optional[Grid1D] = None):
        if len(exponents) == 0:
            raise DomainError('a weight family needs at least one exponent')
        self.exponents = [float(a) for a in exponents]
        self.grid = grid

    def weights(self, grid: Optional[Grid1D] = None) -> List[Weight]:
        grid = grid if grid is not None else self.grid
        if grid is None:
            raise DomainError('power weight family has no grid')
        return power_weights(self.exponents, grid)

    def __len__(self) -> int:
        return len(self.exponents)

    @classmethod
    def from_json(cls, data, dic) -> PowerWeightFamily:
        r"""Create a PowerWeightFamily object.

        **JSON attributes**:

         Mandatory:
          - exponents (list[float]): power exponents.

         Optional:
          - grid (Grid1D): grid of the weights.
        """
        validate(
            data,
            {
                'exponents': {'type': 'number', 'list': True},
                'grid': {'type': 'object|string', 'optional': True},
            },
        )
        grid = process_object(data['grid'], dic) if 'grid' in data else None
        if any(math.isnan(a) for a in data['exponents']):
            raise DomainError('NaN power exponent')
        return cls(data['exponents'], grid)
