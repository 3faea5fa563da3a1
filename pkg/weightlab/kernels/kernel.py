"""Finitely supported convolution kernels on the offsets of a grid."""

from __future__ import annotations

from typing import Optional, Sequence, Union

import torch
import torch.nn.functional as F
from torch import Tensor

from ..core.logger import write_csv
from ..core.serializable import JSONSerializable
from ..core.utils import (
    DTYPE,
    DomainError,
    as_tensor,
    process_object,
    register_class,
    validate,
)
from ..lattice.domain import Grid1D
from ..lattice.functions import GridFunction
from ..lattice.io import parse_float, read_table


@register_class
class Kernel(JSONSerializable):
    r"""Kernel supported on the offsets :math:`-m, \dots, m`.

    :param values: kernel values at offsets :math:`-m..m` (odd length)
    :type values: Tensor or Sequence[float]
    :param float cell_width: cell width :math:`h`
    :param str label: name used in reports
    """

    def __init__(
        self,
        values: Union[Tensor, Sequence[float]],
        cell_width: float,
        label: Optional[str] = None,
    ) -> None:
        values = as_tensor(values).reshape(-1)
        if values.shape[0] % 2 == 0:
            raise DomainError(
                f'kernel needs an odd number of offsets, got {values.shape[0]}'
            )
        if not cell_width > 0:
            raise DomainError(f'cell width must be positive, got {cell_width}')
        if not bool(torch.all(torch.isfinite(values))):
            raise DomainError('kernel values must be finite')
        self.values = values
        self.h = float(cell_width)
        self.label = label if label is not None else 'kernel'

    @property
    def radius(self) -> int:
        return (self.values.shape[0] - 1) // 2

    @property
    def offsets(self) -> Tensor:
        return torch.arange(-self.radius, self.radius + 1)

    @property
    def l1(self) -> float:
        return float(self.h * self.values.abs().sum())

    @property
    def is_causal(self) -> bool:
        """True when the kernel vanishes at negative offsets."""
        return bool(torch.all(self.values[: self.radius] == 0))

    def at(self, offset: int) -> float:
        if abs(offset) > self.radius:
            return 0.0
        return float(self.values[offset + self.radius])

    def abs(self) -> Kernel:
        return Kernel(self.values.abs(), self.h, self.label)

    def reflect(self) -> Kernel:
        r"""Kernel :math:`\tilde k(x) = k(-x)`."""
        return Kernel(self.values.flip(0), self.h, self.label + '~')

    def scaled(self, factor: float) -> Kernel:
        return Kernel(self.values * factor, self.h, self.label)

    def matrix(self, n: int) -> Tensor:
        """Matrix :math:`K_{ts} = k(t - s)` on ``n`` cells."""
        index = torch.arange(n)
        difference = index.unsqueeze(1) - index.unsqueeze(0)
        inside = difference.abs() <= self.radius
        gathered = self.values[(difference + self.radius).clamp(0, 2 * self.radius)]
        return torch.where(inside, gathered, torch.zeros((), dtype=DTYPE))

    def __repr__(self) -> str:
        return f'Kernel({self.label}, radius={self.radius}, h={self.h})'

    @classmethod
    def from_json(cls, data, dic) -> Kernel:
        r"""Create a Kernel object.

        **JSON attributes**:

         Mandatory:
          - either values (list[float]) or name (str) of a catalog kernel.

         Optional:
          - cell_width (float): cell width, or
          - grid (Grid1D): grid providing the cell width.
          - params (dict): catalog parameters (t, m, lambda, mass).
        """
        from .catalog import catalog

        validate(
            data,
            {
                'values': {'type': 'number', 'list': True, 'optional': True},
                'name': {'type': 'string', 'optional': True},
                'params': {'type': 'object', 'optional': True},
                'cell_width': {'type': 'number', 'optional': True},
                'grid': {'type': 'object|string', 'optional': True},
            },
        )
        if 'grid' in data:
            h = process_object(data['grid'], dic).h
        else:
            h = data['cell_width']
        if 'values' in data:
            return cls(data['values'], h, data['id'])
        kernel = catalog(data['name'], data.get('params', {}), h)
        kernel.label = data['id']
        return kernel


def convolve_values(k: Kernel, values: Tensor) -> Tensor:
    r"""Zero-padded convolution :math:`h\sum_j k(i - j) f_j` along the last
    dimension of ``values``."""
    values = as_tensor(values)
    shape = values.shape
    batch = values.reshape(-1, 1, shape[-1])
    weight = k.values.flip(0).reshape(1, 1, -1)
    out = F.conv1d(batch, weight, padding=k.radius)
    return k.h * out.reshape(shape)


def convolve(k: Kernel, f: GridFunction) -> GridFunction:
    r"""Return :math:`T_k f = k * f` restricted to the window of ``f``.

    :example:
    >>> from weightlab.kernels.catalog import box
    >>> f = GridFunction(Grid1D(0.0, 1.0, 5), [0.0, 0.0, 3.0, 0.0, 0.0])
    >>> convolve(box(1, 1.0), f).values.tolist()
    [0.0, 1.0, 1.0, 1.0, 0.0]
    """
    if f.grid.h != k.h:
        raise DomainError(f'kernel cell width {k.h} differs from grid {f.grid.h}')
    return GridFunction(f.grid, convolve_values(k, f.values))


def read_kernel(file_name: str, cell_width: float) -> Kernel:
    """Read an ``offset,value`` table with offsets :math:`-m..m` in order."""
    _, header, rows = read_table(file_name)
    if header != ['offset', 'value']:
        raise DomainError(f'{file_name}: row 1: header must be offset,value')
    if len(rows) == 0:
        raise DomainError(f'{file_name}: no data rows')
    radius = (len(rows) - 1) // 2
    values = []
    for expected, (line_number, fields) in enumerate(rows, start=-radius):
        if len(fields) != 2:
            raise DomainError(f'{file_name}: row {line_number}: expected 2 fields')
        if int(parse_float(file_name, line_number, fields[0])) != expected:
            raise DomainError(
                f'{file_name}: row {line_number}: expected offset {expected}'
            )
        values.append(parse_float(file_name, line_number, fields[1]))
    return Kernel(values, cell_width, file_name)


def write_kernel(k: Kernel, file_name: Optional[str], metadata=None) -> None:
    meta = {'cell_width': k.h, 'label': k.label}
    meta.update(metadata or {})
    write_csv(
        file_name,
        ['offset', 'value'],
        zip(k.offsets.tolist(), k.values.tolist()),
        meta,
    )
