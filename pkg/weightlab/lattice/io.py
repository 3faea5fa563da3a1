"""CSV interchange for grid and lattice functions."""

from __future__ import annotations

import csv
import itertools
import math
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import torch

from ..core.logger import write_csv
from ..core.utils import DTYPE, DomainError
from .domain import Grid1D, MixedSpace
from .functions import GridFunction, LatticeFunction

Row = Tuple[int, List[str]]


def read_table(file_name: str) -> Tuple[Dict[str, str], List[str], List[Row]]:
    """Read a CSV file with ``#`` metadata lines.

    :return: metadata map, header and data rows tagged with their 1-based line
        number
    """
    metadata = {}
    header = None
    rows = []
    try:
        with open(file_name, newline='') as fp:
            for line_number, line in enumerate(fp, start=1):
                stripped = line.strip()
                if stripped == '':
                    continue
                if stripped.startswith('#'):
                    key, sep, value = stripped[1:].partition('=')
                    if sep:
                        metadata[key.strip()] = value.strip()
                    continue
                fields = next(csv.reader([stripped]))
                if header is None:
                    header = [field.strip() for field in fields]
                else:
                    rows.append((line_number, fields))
    except OSError as e:
        raise DomainError(f'cannot read {file_name}: {e.strerror}') from None
    if header is None:
        raise DomainError(f'{file_name}: missing header row')
    return metadata, header, rows


def parse_float(file_name: str, line_number: int, text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise DomainError(
            f'{file_name}: row {line_number}: `{text}\' is not a number'
        ) from None
    if math.isnan(value):
        raise DomainError(f'{file_name}: row {line_number}: NaN value')
    return value


def _check_width(file_name: str, line_number: int, fields: Sequence, width: int):
    if len(fields) != width:
        raise DomainError(
            f'{file_name}: row {line_number}: '
            f'expected {width} fields, got {len(fields)}'
        )


def _check_cells(file_name: str, rows: List[Row]) -> None:
    for expected, (line_number, fields) in enumerate(rows):
        try:
            cell = int(fields[0])
        except ValueError:
            cell = None
        if cell != expected:
            raise DomainError(
                f'{file_name}: row {line_number}: expected cell {expected}'
            )


def grid_from_metadata(metadata: Mapping[str, str], n_cells: int) -> Grid1D:
    origin = float(metadata.get('origin', 0.0))
    width = float(metadata.get('cell_width', 1.0))
    return Grid1D(origin, width, n_cells)


def read_grid_function(file_name: str, grid: Optional[Grid1D] = None) -> GridFunction:
    """Read a ``cell,value`` table.

    The grid is taken from ``origin`` and ``cell_width`` metadata lines when
    ``grid`` is not given (unit cells from 0 otherwise).
    """
    metadata, header, rows = read_table(file_name)
    if header != ['cell', 'value']:
        raise DomainError(f'{file_name}: row 1: header must be cell,value')
    if len(rows) == 0:
        raise DomainError(f'{file_name}: no data rows')
    _check_cells(file_name, rows)
    values = []
    for line_number, fields in rows:
        _check_width(file_name, line_number, fields, 2)
        values.append(parse_float(file_name, line_number, fields[1]))
    if grid is None:
        grid = grid_from_metadata(metadata, len(values))
    elif grid.n_cells != len(values):
        raise DomainError(
            f'{file_name}: {len(values)} rows for a grid of {grid.n_cells} cells'
        )
    return GridFunction(grid, torch.tensor(values, dtype=DTYPE))


def write_grid_function(
    f: GridFunction, file_name: Optional[str], metadata: Optional[Mapping] = None
) -> None:
    meta = {'origin': f.grid.origin, 'cell_width': f.grid.h}
    meta.update(metadata or {})
    write_csv(
        file_name,
        ['cell', 'value'],
        ([i, v] for i, v in enumerate(f.values.tolist())),
        meta,
    )


def lattice_header(space: MixedSpace) -> List[str]:
    """Column names ``cell`` then one column per flattened atom index, e.g.
    ``v0.1``."""
    if space.n_axes == 0:
        return ['cell', 'value']
    indices = itertools.product(*(range(n) for n in space.shape))
    return ['cell'] + ['v' + '.'.join(map(str, index)) for index in indices]


def read_lattice_function(
    file_name: str, space: MixedSpace, grid: Optional[Grid1D] = None
) -> LatticeFunction:
    """Read a lattice function written by :func:`write_lattice_function`."""
    metadata, header, rows = read_table(file_name)
    expected = lattice_header(space)
    if header != expected:
        raise DomainError(
            f'{file_name}: row 1: header does not match axes {space.shape}'
        )
    if len(rows) == 0:
        raise DomainError(f'{file_name}: no data rows')
    _check_cells(file_name, rows)
    values = []
    for line_number, fields in rows:
        _check_width(file_name, line_number, fields, len(expected))
        values.append([parse_float(file_name, line_number, x) for x in fields[1:]])
    if grid is None:
        grid = grid_from_metadata(metadata, len(values))
    tensor = torch.tensor(values, dtype=DTYPE).reshape((len(values),) + space.shape)
    return LatticeFunction(grid, space, tensor)


def write_lattice_function(
    F: LatticeFunction, file_name: Optional[str], metadata: Optional[Mapping] = None
) -> None:
    meta: Dict[str, Any] = {'origin': F.grid.origin, 'cell_width': F.grid.h}
    meta.update(metadata or {})
    flat = F.values.reshape(F.grid.n_cells, -1).tolist()
    write_csv(
        file_name,
        lattice_header(F.space),
        ([i] + row for i, row in enumerate(flat)),
        meta,
    )
