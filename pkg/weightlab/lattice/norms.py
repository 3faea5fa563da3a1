r"""Weighted, iterated and tuple norms.

Every power sum is rescaled by the largest absolute value along the reduced
axis, so exponents up to 100 neither overflow nor produce NaN gradients at
zero.
"""

from __future__ import annotations

import math
from typing import Optional, Sequence, Union

import torch
from torch import Tensor

from ..core.utils import DomainError, as_tensor, check_exponent
from .domain import Grid1D, MixedSpace
from .functions import GridFunction, LatticeFunction


def reduce_last(values: Tensor, masses: Optional[Tensor], q: float) -> Tensor:
    r"""Weighted :math:`\ell^q` norm along the last dimension.

    :param Tensor values: tensor whose last dimension is reduced
    :param masses: atom masses (counting measure when None)
    :param float q: exponent in :math:`[1, \infty]`
    :return: tensor with the last dimension removed
    """
    a = values.abs()
    if math.isinf(q):
        return a.amax(-1)
    scale = a.amax(-1, keepdim=True)
    positive = scale > 0
    safe_scale = torch.where(positive, scale, torch.ones_like(scale))
    powers = (a / safe_scale) ** q
    if masses is not None:
        powers = powers * masses
    total = powers.sum(-1, keepdim=True)
    total = torch.where(positive, total, torch.ones_like(total))
    norm = torch.where(
        positive, safe_scale * total ** (1.0 / q), torch.zeros_like(scale)
    )
    return norm.squeeze(-1)


def mixed_norm(F: Union[Tensor, Sequence], space: MixedSpace) -> Tensor:
    r"""Iterated norm :math:`\|F\|_{L^{q_1}(\Omega_1, \dots, L^{q_n}(\Omega_n))}`.

    The trailing dimensions of ``F`` must match the axes of ``space``; leading
    dimensions are treated as a batch.

    :example:
    >>> space = MixedSpace.counting([2, 2], [1, 2])
    >>> round(float(mixed_norm([[1.0, 1.0], [1.0, 1.0]], space)) ** 2, 12)
    8.0
    """
    F = as_tensor(F)
    n = space.n_axes
    if F.dim() < n or tuple(F.shape[F.dim() - n :]) != space.shape:
        raise DomainError(
            f'tensor of shape {tuple(F.shape)} does not match space shape {space.shape}'
        )
    if n == 0:
        return F.abs()
    out = F
    for axis, q in zip(reversed(space.axes), reversed(space.exponents)):
        out = reduce_last(out, axis.masses, q)
    return out


def weighted_lp_norm(
    f: GridFunction, p: float, w: Optional[GridFunction] = None
) -> Tensor:
    r"""Return :math:`(h\sum_i |f_i|^p w_i)^{1/p}`.

    :param GridFunction f: function
    :param float p: exponent in :math:`(1, \infty)`
    :param w: positive weight on the same grid, unweighted when None
    :type w: GridFunction or None
    """
    p = check_exponent(p)
    masses = torch.full_like(f.values, f.grid.h)
    if w is not None:
        if w.grid != f.grid:
            raise DomainError('function and weight live on different grids')
        if not bool(torch.all(w.values > 0)):
            raise DomainError('weight must be strictly positive')
        masses = masses * w.values
    return reduce_last(f.values, masses, p)


def tuple_norm(
    fs: Union[Tensor, Sequence[Tensor]], s: float, space: MixedSpace
) -> Tensor:
    r"""Norm :math:`\|(\sum_n |f_n|^s)^{1/s}\|_X` of a finite tuple, with the
    pointwise maximum at :math:`s = \infty`.

    :param fs: tuple entries, or a tensor whose first dimension indexes them
    :param float s: exponent in :math:`[1, \infty]`
    :param MixedSpace space: the lattice :math:`X`
    """
    if isinstance(fs, Tensor):
        stacked = fs
    else:
        if len(fs) == 0:
            raise DomainError('empty tuple')
        entries = [as_tensor(f) for f in fs]
        if any(e.shape != entries[0].shape for e in entries):
            raise DomainError('tuple entries have different shapes')
        stacked = torch.stack(entries)
    if stacked.dim() == 0 or stacked.shape[0] == 0:
        raise DomainError('empty tuple')
    s = check_exponent(s, 's', allow_inf=True, inclusive=True)
    pointwise = reduce_last(stacked.movedim(0, -1), None, s)
    return mixed_norm(pointwise, space)


def lattice_space(
    grid: Grid1D, space: MixedSpace, p: float, w: Optional[GridFunction] = None
) -> MixedSpace:
    r"""The space :math:`L^p(\mathbb{R}, w; X)` as a mixed space whose first
    axis is the grid with masses :math:`h w_i`."""
    weight = None if w is None else w.values
    return space.prepend(grid.as_axis(weight), p)


def lattice_norm(
    F: LatticeFunction, p: float, w: Optional[GridFunction] = None
) -> Tensor:
    r"""Return :math:`\|F\|_{L^p(\mathbb{R}, w; L^{\bar q}(\Omega))}`."""
    p = check_exponent(p)
    if w is not None and w.grid != F.grid:
        raise DomainError('function and weight live on different grids')
    return mixed_norm(F.values, lattice_space(F.grid, F.space, p, w))


def fiber_norms(F: LatticeFunction) -> GridFunction:
    r"""Grid function :math:`x \mapsto \|F(x, \cdot)\|_{L^{\bar q}(\Omega)}`."""
    return GridFunction(F.grid, mixed_norm(F.values, F.space))
