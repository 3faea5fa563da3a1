"""Finite measured domains: the time/space grid and the atomic factors of a
mixed-norm space."""

from __future__ import annotations

import math
from typing import Any, Optional, Sequence, Union

import torch
from torch import Tensor

from ..core.serializable import JSONSerializable
from ..core.utils import (
    DTYPE,
    DomainError,
    as_tensor,
    check_exponent,
    conjugate,
    process_object,
    register_class,
    validate,
)


def parse_exponent(value: Union[str, float, int]) -> float:
    """Read an exponent, accepting ``'inf'`` for the symbolic infinity.

    :example:
    >>> parse_exponent('inf')
    inf
    >>> parse_exponent(3)
    3.0
    """
    if isinstance(value, str):
        if value.strip().lower() in ('inf', 'infinity', '∞'):
            return math.inf
        try:
            return float(value)
        except ValueError:
            raise DomainError(f'invalid exponent: {value}') from None
    return float(value)


@register_class
class Grid1D(JSONSerializable):
    r"""Uniform grid on a bounded window of the real line.

    Cell ``i`` covers :math:`[o + ih, o + (i+1)h)` and integrals are cell sums
    :math:`\int f = h\sum_i f_i`.

    :param float origin: left edge of the window
    :param float cell_width: cell width :math:`h > 0`
    :param int n_cells: number of cells
    """

    def __init__(self, origin: float, cell_width: float, n_cells: int) -> None:
        if not cell_width > 0:
            raise DomainError(f'cell width must be positive, got {cell_width}')
        if int(n_cells) != n_cells or n_cells < 1:
            raise DomainError(f'number of cells must be >= 1, got {n_cells}')
        self.origin = float(origin)
        self.h = float(cell_width)
        self.n_cells = int(n_cells)

    @classmethod
    def symmetric(cls, half_width: float, n_cells: int) -> Grid1D:
        """Grid covering :math:`[-a, a)` with ``n_cells`` cells."""
        return cls(-half_width, 2.0 * half_width / n_cells, n_cells)

    @property
    def edges(self) -> Tensor:
        return self.origin + self.h * torch.arange(self.n_cells + 1, dtype=DTYPE)

    @property
    def centers(self) -> Tensor:
        return self.origin + self.h * (torch.arange(self.n_cells, dtype=DTYPE) + 0.5)

    def integrate(self, values: Tensor) -> Tensor:
        return self.h * values.sum(-1)

    def refine(self, factor: int = 2) -> Grid1D:
        """Split every cell into ``factor`` cells over the same window."""
        return Grid1D(self.origin, self.h / factor, self.n_cells * factor)

    def as_axis(self, weight: Optional[Tensor] = None) -> MeasuredAxis:
        """Measured axis with masses :math:`h w_i` (or :math:`h`)."""
        masses = torch.full((self.n_cells,), self.h, dtype=DTYPE)
        if weight is not None:
            masses = masses * weight
        return MeasuredAxis(masses)

    def __len__(self) -> int:
        return self.n_cells

    def __eq__(self, other: Any) -> bool:
        return (
            isinstance(other, Grid1D)
            and self.origin == other.origin
            and self.h == other.h
            and self.n_cells == other.n_cells
        )

    def __hash__(self) -> int:
        return hash((self.origin, self.h, self.n_cells))

    def __repr__(self) -> str:
        return f'Grid1D(origin={self.origin}, h={self.h}, n_cells={self.n_cells})'

    @classmethod
    def from_json(cls, data, dic) -> Grid1D:
        r"""Create a Grid1D object.

        **JSON attributes**:

         Mandatory:
          - n_cells (int): number of cells.

         Optional:
          - origin (float): left edge (default: -half_width or 0).
          - cell_width (float): cell width (default: 1).
          - half_width (float): build the symmetric window [-a, a) instead.
        """
        validate(
            data,
            {
                'n_cells': {'type': 'int'},
                'origin': {'type': 'number', 'optional': True},
                'cell_width': {'type': 'number', 'optional': True},
                'half_width': {'type': 'number', 'optional': True},
            },
        )
        if 'half_width' in data:
            return cls.symmetric(data['half_width'], data['n_cells'])
        return cls(
            data.get('origin', 0.0), data.get('cell_width', 1.0), data['n_cells']
        )


@register_class
class MeasuredAxis(JSONSerializable):
    """Finite atomic measure space given by strictly positive atom masses.

    :param masses: atom masses
    :type masses: Tensor or Sequence[float]
    """

    def __init__(self, masses: Union[Tensor, Sequence[float]]) -> None:
        masses = as_tensor(masses).reshape(-1)
        if masses.numel() == 0:
            raise DomainError('a measured axis needs at least one atom')
        finite = bool(torch.all(torch.isfinite(masses)))
        if not bool(torch.all(masses > 0)) or not finite:
            raise DomainError('atom masses must be finite and strictly positive')
        self.masses = masses

    @classmethod
    def counting(cls, size: int) -> MeasuredAxis:
        return cls(torch.ones(size, dtype=DTYPE))

    @property
    def size(self) -> int:
        return self.masses.shape[0]

    def __eq__(self, other: Any) -> bool:
        return isinstance(other, MeasuredAxis) and torch.equal(
            self.masses, other.masses
        )

    def __repr__(self) -> str:
        return f'MeasuredAxis(size={self.size})'

    @classmethod
    def from_json(cls, data, dic) -> MeasuredAxis:
        validate(
            data,
            {
                'masses': {'type': 'number', 'list': True, 'optional': True},
                'size': {'type': 'int', 'optional': True},
            },
        )
        if 'masses' in data:
            return cls(data['masses'])
        return cls.counting(data['size'])


@register_class
class MixedSpace(JSONSerializable):
    r"""Iterated Lebesgue space :math:`L^{q_1}(\Omega_1, \dots, L^{q_n}(\Omega_n))`.

    Norms reduce the last axis first. A space with no axes is the scalar field.

    :param axes: measured axes, outermost first
    :type axes: Sequence[MeasuredAxis]
    :param exponents: one exponent in :math:`[1, \infty]` per axis
    :type exponents: Sequence[float]
    """

    def __init__(
        self, axes: Sequence[MeasuredAxis], exponents: Sequence[Union[float, str]]
    ) -> None:
        axes = list(axes)
        exponents = [parse_exponent(q) for q in exponents]
        if len(axes) != len(exponents):
            raise DomainError(
                f'{len(axes)} axes but {len(exponents)} exponents were given'
            )
        self.axes = axes
        self.exponents = [
            check_exponent(q, 'q', allow_inf=True, inclusive=True) for q in exponents
        ]

    @classmethod
    def counting(
        cls, sizes: Sequence[int], exponents: Sequence[Union[float, str]]
    ) -> MixedSpace:
        return cls([MeasuredAxis.counting(n) for n in sizes], exponents)

    @property
    def n_axes(self) -> int:
        return len(self.axes)

    @property
    def shape(self) -> tuple:
        return tuple(axis.size for axis in self.axes)

    @property
    def dim(self) -> int:
        return int(math.prod(self.shape))

    def masses(self) -> Tensor:
        """Product masses as a tensor of shape :attr:`shape`."""
        total = torch.ones((), dtype=DTYPE)
        for axis in self.axes:
            total = total.unsqueeze(-1) * axis.masses
        return total

    def dual(self) -> MixedSpace:
        r"""Space with the conjugate exponents :math:`\bar q'` on the same
        axes."""
        return MixedSpace(self.axes, [conjugate(q) for q in self.exponents])

    @property
    def is_flat(self) -> bool:
        return len(set(self.exponents)) <= 1

    def flatten(self) -> MixedSpace:
        """Single-axis space with the product masses; exponents must agree."""
        if not self.is_flat or self.n_axes == 0:
            raise DomainError('only spaces with one common exponent can be flattened')
        return MixedSpace(
            [MeasuredAxis(self.masses().reshape(-1))], [self.exponents[0]]
        )

    def prepend(self, axis: MeasuredAxis, exponent: float) -> MixedSpace:
        return MixedSpace([axis] + self.axes, [exponent] + self.exponents)

    def append(self, axis: MeasuredAxis, exponent: float) -> MixedSpace:
        return MixedSpace(self.axes + [axis], self.exponents + [exponent])

    def __eq__(self, other: Any) -> bool:
        return (
            isinstance(other, MixedSpace)
            and self.exponents == other.exponents
            and self.axes == other.axes
        )

    def __repr__(self) -> str:
        return f'MixedSpace(shape={self.shape}, exponents={self.exponents})'

    @classmethod
    def from_json(cls, data, dic) -> MixedSpace:
        r"""Create a MixedSpace object.

        **JSON attributes**:

         Mandatory:
          - exponents (list): one exponent per axis, ``"inf"`` allowed.

         Optional:
          - axes (list): MeasuredAxis objects or references.
          - sizes (list[int]): counting axes of the given sizes.
        """
        validate(
            data,
            {
                'exponents': {'type': 'number|string', 'list': True},
                'axes': {'type': 'object|string', 'list': True, 'optional': True},
                'sizes': {'type': 'int', 'list': True, 'optional': True},
            },
        )
        if 'axes' in data:
            axes = [process_object(axis, dic) for axis in data['axes']]
            return cls(axes, data['exponents'])
        return cls.counting(data.get('sizes', []), data['exponents'])
