r"""Uncentered Hardy-Littlewood maximal operators on a grid.

Admissible intervals are cell-aligned and never wrap around the window, so

.. math::
    Mf(i) = \max_{a \le i \le b} \frac{1}{b - a + 1} \sum_{j=a}^{b} |f_j|.
"""

from __future__ import annotations

import math
from typing import Tuple

import torch
from torch import Tensor

from ..core.utils import as_tensor
from ..lattice.functions import GridFunction, LatticeFunction
from ..weights.muckenhoupt import interval_averages, prefix_sums

# upper bound on the number of interval averages held at once
BLOCK_ELEMENTS = 1 << 22


def maximal_values(values: Tensor) -> Tensor:
    """Maximal function along the last dimension of ``values``.

    All interval averages are formed from prefix sums; a reversed running
    maximum over interval ends followed by a maximum over starts gives every
    cell at once.
    """
    a = as_tensor(values).abs()
    n = a.shape[-1]
    batch = max(1, a.numel() // max(n, 1))
    chunk = max(1, BLOCK_ELEMENTS // (batch * n))
    prefix = prefix_sums(a)
    cells = torch.arange(n)
    out = torch.full_like(a, -math.inf)
    for start in range(0, n, chunk):
        starts = torch.arange(start, min(n, start + chunk))
        averages = torch.nan_to_num(
            interval_averages(prefix, starts), nan=-math.inf
        )
        # best average over ends b >= i for every start a
        suffix = averages.flip(-1).cummax(-1).values.flip(-1)
        admissible = starts.unsqueeze(1) <= cells.unsqueeze(0)
        candidates = torch.where(
            admissible, suffix, torch.full_like(suffix, -math.inf)
        ).amax(-2)
        out = torch.maximum(out, candidates)
    return out


def maximal_function(f: GridFunction) -> GridFunction:
    """Uncentered maximal function :math:`Mf`.

    :example:
    >>> from weightlab.lattice import Grid1D
    >>> f = GridFunction(Grid1D(0.0, 1.0, 4), [0.0, 4.0, 0.0, 0.0])
    >>> [round(x, 12) for x in maximal_function(f).values.tolist()]
    [2.0, 4.0, 2.0, 1.333333333333]
    """
    return GridFunction(f.grid, maximal_values(f.values))


def lattice_maximal(F: LatticeFunction) -> LatticeFunction:
    r"""Fiberwise maximal function :math:`\tilde M F(x, s) = M(F(\cdot, s))(x)`."""
    moved = F.values.movedim(0, -1)
    return F.with_values(maximal_values(moved).movedim(-1, 0))


def maximizing_interval(f: GridFunction, cell: int) -> Tuple[Tuple[int, int], float]:
    """Interval attaining :math:`Mf` at ``cell``.

    Ties go to the shortest interval, then to the leftmost one.

    :return: the interval ``(a, b)`` and its average
    """
    n = f.grid.n_cells
    if not 0 <= cell < n:
        raise IndexError(f'cell {cell} outside grid of {n} cells')
    prefix = prefix_sums(f.values.abs())
    best = (-math.inf, 0, 0)
    for length in range(1, n + 1):
        for a in range(max(0, cell - length + 1), min(cell, n - length) + 1):
            b = a + length - 1
            average = float((prefix[b + 1] - prefix[a]) / length)
            if average > best[0]:
                best = (average, a, b)
    return (best[1], best[2]), best[0]


def maximal_reference(values: Tensor) -> Tensor:
    """Triple-loop evaluation of :func:`maximal_values` on a 1-D tensor.

    Interval sums come from the same prefix sums, so both evaluations agree
    bit for bit.
    """
    a = as_tensor(values).abs()
    n = a.shape[0]
    prefix = prefix_sums(a).tolist()
    out = []
    for i in range(n):
        best = -math.inf
        for start in range(i + 1):
            for end in range(i, n):
                best = max(best, (prefix[end + 1] - prefix[start]) / (end - start + 1))
        out.append(best)
    return torch.tensor(out, dtype=a.dtype)
