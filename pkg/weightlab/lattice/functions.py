from __future__ import annotations

from typing import Sequence, Union

import torch
from torch import Tensor

from ..core.utils import DTYPE, DomainError, as_tensor
from .domain import Grid1D, MixedSpace


class GridFunction:
    """Scalar field on a :class:`Grid1D`.

    :param Grid1D grid: grid
    :param values: one value per cell
    :type values: Tensor or Sequence[float]
    """

    def __init__(self, grid: Grid1D, values: Union[Tensor, Sequence[float]]) -> None:
        values = as_tensor(values)
        if values.dim() != 1 or values.shape[0] != grid.n_cells:
            raise DomainError(
                f'expected {grid.n_cells} values, got shape {tuple(values.shape)}'
            )
        self.grid = grid
        self.values = values

    @classmethod
    def constant(cls, grid: Grid1D, value: float = 1.0) -> GridFunction:
        return cls(grid, torch.full((grid.n_cells,), float(value), dtype=DTYPE))

    def with_values(self, values: Tensor) -> GridFunction:
        return type(self)(self.grid, values)

    def abs(self) -> GridFunction:
        return GridFunction(self.grid, self.values.abs())

    def __len__(self) -> int:
        return self.grid.n_cells

    def __repr__(self) -> str:
        return f'{type(self).__name__}({self.grid!r}, {self.values.tolist()})'


class LatticeFunction:
    r"""Field :math:`f : \mathbb{R} \times \Omega \to \mathbb{R}` on a grid with
    values in a mixed-norm space.

    :param Grid1D grid: grid of the x-variable
    :param MixedSpace space: space of the values
    :param Tensor values: tensor of shape ``(n_cells, *space.shape)``
    """

    def __init__(self, grid: Grid1D, space: MixedSpace, values: Tensor) -> None:
        values = as_tensor(values)
        expected = (grid.n_cells,) + space.shape
        if tuple(values.shape) != expected:
            raise DomainError(
                f'expected shape {expected}, got {tuple(values.shape)}'
            )
        self.grid = grid
        self.space = space
        self.values = values

    @classmethod
    def from_grid_function(cls, f: GridFunction) -> LatticeFunction:
        """View a scalar field as a lattice function over the empty space."""
        return cls(f.grid, MixedSpace([], []), f.values)

    def fiber(self, index: Sequence[int]) -> GridFunction:
        """The grid function :math:`x \\mapsto f(x, s)` for a fixed atom ``s``."""
        return GridFunction(self.grid, self.values[(slice(None),) + tuple(index)])

    def fibers(self) -> Tensor:
        """All fibers as rows of a ``(n_fibers, n_cells)`` tensor."""
        return self.values.reshape(self.grid.n_cells, -1).transpose(0, 1)

    def with_values(self, values: Tensor) -> LatticeFunction:
        return LatticeFunction(self.grid, self.space, values)

    def __repr__(self) -> str:
        return f'LatticeFunction({self.grid!r}, {self.space!r})'