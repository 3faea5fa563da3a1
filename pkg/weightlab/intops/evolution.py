r"""Two-parameter evolution families :math:`T(t, s)` on a time grid.

A family is stored as a tensor of shape ``(n_t, n_t, D, D)`` holding the
matrix of :math:`T(t, s)` on the flattened space :math:`X` for every pair of
time cells. Measurability conditions in :math:`(t, s)` are vacuous on finite
grids.
"""

from __future__ import annotations

import logging
from typing import Optional, Sequence, Union

import torch
from torch import Tensor

from ..core.utils import (
    DTYPE,
    RELATIVE_TOLERANCE,
    DomainError,
    PropertyCheckError,
    as_tensor,
    make_generator,
    validate,
)
from ..kernels.catalog import gaussian
from ..lattice.domain import Grid1D, MeasuredAxis, MixedSpace
from ..sbound.family import (
    GENERIC,
    MULTIPLICATION,
    check_dual_exponents,
    operator_norm_bound,
)

logger = logging.getLogger(__name__)

PERIODIC = 'periodic'
ZERO_PADDED = 'zero_padded'
BOUNDARIES = (PERIODIC, ZERO_PADDED)

EVOLUTION_KINDS = ('heat', 'identity', 'multiplication')


class EvolutionFamily:
    r"""Operators :math:`T(t, s)` on a mixed space for every pair of cells
    of a time grid.

    :param Grid1D time_grid: time grid
    :param MixedSpace space: the space :math:`X`
    :param Tensor operators: tensor of shape ``(n_t, n_t, X.dim, X.dim)``
    :param str label: name used in reports
    :param str structure: ``generic`` or ``multiplication`` (diagonal
        operators)
    """

    def __init__(
        self,
        time_grid: Grid1D,
        space: MixedSpace,
        operators: Tensor,
        label: str = 'family',
        structure: str = GENERIC,
    ) -> None:
        operators = as_tensor(operators)
        n = time_grid.n_cells
        expected = (n, n, space.dim, space.dim)
        if tuple(operators.shape) != expected:
            raise DomainError(
                f'expected operators of shape {expected}, got {tuple(operators.shape)}'
            )
        if structure not in (GENERIC, MULTIPLICATION):
            raise DomainError(f'unsupported evolution structure `{structure}\'')
        if structure == MULTIPLICATION:
            eye = torch.eye(space.dim, dtype=torch.bool)
            if bool(((operators != 0) & ~eye).any()):
                raise DomainError('multiplication operators must be diagonal')
        self.time_grid = time_grid
        self.space = space
        self.operators = operators
        self.label = label
        self.structure = structure

    @property
    def n_times(self) -> int:
        return self.time_grid.n_cells

    def __call__(self, t: int, s: int) -> Tensor:
        return self.operators[t, s]

    @property
    def is_causal(self) -> bool:
        """True when :math:`T(t, s) = 0` for :math:`t < s`."""
        upper = torch.triu(torch.ones(self.n_times, self.n_times), diagonal=1).bool()
        return not bool(self.operators[upper].any())

    def uniform_bound(self) -> Optional[float]:
        r""":math:`\sup_{t,s}\|T(t,s)\|_{B(X)}`, None when :math:`X` has
        mixed exponents."""
        flat = self.operators.reshape((-1,) + self.operators.shape[-2:])
        nonzero = flat.abs().sum((-1, -2)) > 0
        bound = 0.0
        for matrix in flat[nonzero]:
            value = operator_norm_bound(matrix, self.space, self.space)
            if value is None:
                return None
            bound = max(bound, value)
        return bound

    def multiplier_bound(self) -> float:
        r"""Largest :math:`|m(t, s)(i)|` of a multiplication family, which
        is its :math:`\ell^s`-bound for every :math:`s`."""
        if self.structure != MULTIPLICATION:
            raise DomainError('multiplier bounds need a multiplication family')
        return float(torch.diagonal(self.operators, dim1=-2, dim2=-1).abs().max())

    def semigroup_defect(self) -> float:
        r"""Return :math:`\max_{t \ge s \ge r}|T(t,s)T(s,r) - T(t,r)|`
        entrywise."""
        n = self.n_times
        index = torch.arange(n)
        defect = 0.0
        for s in range(n):
            products = torch.einsum(
                'tij,rjk->trik', self.operators[:, s], self.operators[s, :]
            )
            mask = (index >= s).unsqueeze(1) & (index <= s).unsqueeze(0)
            gap = (products - self.operators)[mask]
            if gap.numel() > 0:
                defect = max(defect, float(gap.abs().max()))
        return defect

    def scaled(self, factor: float) -> EvolutionFamily:
        return EvolutionFamily(
            self.time_grid,
            self.space,
            self.operators * factor,
            self.label,
            self.structure,
        )

    def adjoint(self) -> EvolutionFamily:
        r"""Family :math:`T^*(s, t) = T(t, s)^*` on the dual space, adjoints
        taken with respect to the atom masses of :math:`X`."""
        check_dual_exponents(self.space)
        mu = self.space.masses().reshape(-1)
        transposed = self.operators.transpose(0, 1).transpose(-1, -2)
        return EvolutionFamily(
            self.time_grid,
            self.space.dual(),
            transposed * mu / mu.unsqueeze(-1),
            self.label + '*',
            self.structure,
        )

    def __repr__(self) -> str:
        return (
            f'EvolutionFamily({self.label}, n_t={self.n_times}, {self.space!r}, '
            f'{self.structure})'
        )


def _causal_from_lags(time_grid: Grid1D, lagged: Tensor) -> Tensor:
    """Place ``lagged[t - s]`` at ``(t, s)`` for ``t >= s`` and zero
    elsewhere."""
    n = time_grid.n_cells
    index = torch.arange(n)
    lag = index.unsqueeze(1) - index.unsqueeze(0)
    operators = lagged[lag.clamp(min=0)]
    return operators * (lag >= 0).to(DTYPE).unsqueeze(-1).unsqueeze(-1)


def periodic_laplacian(points: int, h: float) -> Tensor:
    r"""Discrete Laplacian on a torus of ``points`` cells of width ``h``.

    :example:
    >>> periodic_laplacian(3, 1.0).tolist()
    [[-2.0, 1.0, 1.0], [1.0, -2.0, 1.0], [1.0, 1.0, -2.0]]
    """
    if points < 3:
        raise DomainError(f'a periodic grid needs at least 3 points, got {points}')
    eye = torch.eye(points, dtype=DTYPE)
    shifted = torch.roll(eye, 1, 0) + torch.roll(eye, -1, 0)
    return (shifted - 2.0 * eye) / h**2


def spatial_space(spatial_grid: Grid1D, q: float) -> MixedSpace:
    """The space :math:`L^q` over the cells of ``spatial_grid``."""
    return MixedSpace([spatial_grid.as_axis()], [q])


def heat_evolution_family(
    time_grid: Grid1D,
    spatial_grid: Grid1D,
    q: float,
    scale: float = 1.0,
    boundary: str = PERIODIC,
) -> EvolutionFamily:
    r"""Heat family :math:`T(t, s) = e^{(t-s)\,\mathrm{scale}\,\Delta}` for
    :math:`t \ge s`, zero otherwise.

    ``periodic`` exponentiates the periodic discrete Laplacian and is an exact
    semigroup; ``zero_padded`` convolves with the discrete Gaussian cut at
    the boundary, which loses mass near the ends (see
    :meth:`EvolutionFamily.semigroup_defect`).

    :param Grid1D time_grid: time grid
    :param Grid1D spatial_grid: spatial cells
    :param float q: exponent of :math:`X = L^q`
    :param float scale: diffusion scale, positive
    :param str boundary: ``periodic`` or ``zero_padded``
    """
    if not scale > 0:
        raise DomainError(f'diffusion scale must be positive, got {scale}')
    if boundary not in BOUNDARIES:
        raise DomainError(f'unknown boundary `{boundary}\'')
    points = spatial_grid.n_cells
    h = spatial_grid.h
    times = torch.arange(time_grid.n_cells, dtype=DTYPE) * time_grid.h * scale
    if boundary == PERIODIC:
        generator = periodic_laplacian(points, h)
        lagged = torch.matrix_exp(times.reshape(-1, 1, 1) * generator)
    else:
        lagged = torch.stack(
            [h * gaussian(float(t), h).matrix(points) for t in times]
        )
    return EvolutionFamily(
        time_grid,
        spatial_space(spatial_grid, q),
        _causal_from_lags(time_grid, lagged),
        f'heat({boundary}, scale={scale})',
    )


def identity_evolution_family(
    time_grid: Grid1D, space: MixedSpace, causal: bool = True
) -> EvolutionFamily:
    """:math:`T(t, s) = I`, for :math:`t \\ge s` only when ``causal``."""
    eye = torch.eye(space.dim, dtype=DTYPE)
    lagged = eye.expand(time_grid.n_cells, space.dim, space.dim)
    if causal:
        operators = _causal_from_lags(time_grid, lagged)
    else:
        n = time_grid.n_cells
        operators = eye.expand(n, n, space.dim, space.dim).clone()
    return EvolutionFamily(
        time_grid, space, operators, 'identity', MULTIPLICATION
    )


def multiplication_evolution_family(
    time_grid: Grid1D,
    space: MixedSpace,
    multipliers: Union[Tensor, Sequence],
    causal: bool = True,
    label: str = 'multiplication',
) -> EvolutionFamily:
    """Diagonal family from multipliers of shape ``(n_t, n_t, X.dim)``."""
    multipliers = as_tensor(multipliers)
    n = time_grid.n_cells
    if tuple(multipliers.shape) != (n, n, space.dim):
        raise DomainError(
            f'expected multipliers of shape {(n, n, space.dim)}, '
            f'got {tuple(multipliers.shape)}'
        )
    if causal:
        multipliers = torch.tril(multipliers.movedim(-1, 0)).movedim(0, -1)
    return EvolutionFamily(
        time_grid, space, torch.diag_embed(multipliers), label, MULTIPLICATION
    )


def random_multiplication_family(
    time_grid: Grid1D, space: MixedSpace, seed: int, bound: float = 1.0
) -> EvolutionFamily:
    """Causal multiplication family with seeded multipliers in
    ``[-bound, bound]``."""
    generator = make_generator(seed)
    n = time_grid.n_cells
    multipliers = bound * (
        2.0 * torch.rand((n, n, space.dim), generator=generator, dtype=DTYPE) - 1.0
    )
    return multiplication_evolution_family(
        time_grid, space, multipliers, label=f'multiplication(seed={seed})'
    )


def extend_restrict(matrix: Tensor, cells: Sequence[int], full: MixedSpace) -> Tensor:
    r"""Operator :math:`\tilde T = E\,T\,R` on ``full`` for :math:`T` acting on
    the atoms ``cells``, with :math:`R` the restriction and :math:`E` the
    extension by zero.

    :param Tensor matrix: square matrix on the subdomain
    :param cells: atom indices of the subdomain in the flattened ``full``
    :param MixedSpace full: flat space of the whole domain
    :raises PropertyCheckError: if :math:`\|\tilde T\| > \|T\|`

    :example:
    >>> full = MixedSpace.counting([3], [2])
    >>> extend_restrict(torch.eye(2, dtype=DTYPE), [0, 2], full).tolist()
    [[1.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 1.0]]
    """
    matrix = as_tensor(matrix)
    cells = [int(c) for c in cells]
    if len(set(cells)) != len(cells) or any(not 0 <= c < full.dim for c in cells):
        raise DomainError(
            f'subdomain cells must be distinct atoms of 0..{full.dim - 1}'
        )
    if tuple(matrix.shape) != (len(cells), len(cells)):
        raise DomainError(
            f'a {len(cells)}-cell subdomain needs a square matrix of that size'
        )
    index = torch.as_tensor(cells, dtype=torch.long)
    extended = torch.zeros((full.dim, full.dim), dtype=DTYPE)
    extended[index.unsqueeze(1), index.unsqueeze(0)] = matrix
    if full.n_axes > 0 and full.is_flat:
        sub = MixedSpace(
            [MeasuredAxis(full.masses().reshape(-1)[index])], [full.exponents[0]]
        )
        norm = operator_norm_bound(matrix, sub, sub)
        norm_extended = operator_norm_bound(extended, full, full)
        if norm_extended > norm * (1.0 + RELATIVE_TOLERANCE):
            raise PropertyCheckError(
                'extension-norm', f'|ETR| = {norm_extended} exceeds |T| = {norm}'
            )
    return extended


def extend_evolution_family(
    family: EvolutionFamily, cells: Sequence[int], full: MixedSpace
) -> EvolutionFamily:
    """Apply :func:`extend_restrict` to every :math:`T(t, s)`."""
    n = family.n_times
    flat = family.operators.reshape((n * n,) + family.operators.shape[-2:])
    extended = torch.stack([extend_restrict(m, cells, full) for m in flat])
    return EvolutionFamily(
        family.time_grid,
        full,
        extended.reshape(n, n, full.dim, full.dim),
        family.label + '~',
        family.structure,
    )


def evolution_family_from_json(
    data: dict, time_grid: Grid1D, q: float, seed: int = 0
) -> EvolutionFamily:
    r"""Build an evolution family from a configuration section.

    **JSON attributes**:

     Mandatory:
      - kind (str): heat, identity or multiplication.
      - points (int): number of spatial cells.

     Optional:
      - width (float): spatial cell width (default: 1).
      - scale (float): diffusion scale of the heat family (default: 1).
      - boundary (str): periodic or zero_padded (default: periodic).
      - bound (float): multiplier bound of random multiplication families.
    """
    validate(
        data,
        {
            'kind': {'type': 'string'},
            'points': {'type': 'int'},
            'width': {'type': 'number', 'optional': True},
            'scale': {'type': 'number', 'optional': True},
            'boundary': {'type': 'string', 'optional': True},
            'bound': {'type': 'number', 'optional': True},
        },
    )
    kind = data['kind']
    if kind not in EVOLUTION_KINDS:
        raise DomainError(
            f'unknown evolution family `{kind}\' '
            f'(expected one of {", ".join(EVOLUTION_KINDS)})'
        )
    spatial_grid = Grid1D(0.0, data.get('width', 1.0), data['points'])
    if kind == 'heat':
        return heat_evolution_family(
            time_grid,
            spatial_grid,
            q,
            data.get('scale', 1.0),
            data.get('boundary', PERIODIC),
        )
    space = spatial_space(spatial_grid, q)
    if kind == 'identity':
        return identity_evolution_family(time_grid, space)
    return random_multiplication_family(
        time_grid, space, seed, data.get('bound', 1.0)
    )
