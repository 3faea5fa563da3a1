"""Muckenhoupt A_p constants on a one-dimensional grid."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence, Union

import torch
from torch import Tensor

from ..core.utils import (
    DomainError,
    InfeasibleError,
    check_exponent,
    conjugate,
    relative_le,
)
from ..lattice.domain import Grid1D
from ..lattice.functions import GridFunction
from ..typing import Interval

logger = logging.getLogger(__name__)

CHUNK = 512

OPENNESS_RESOLUTION = 1e-3


class Weight(GridFunction):
    """Strictly positive grid function."""

    def __init__(self, grid: Grid1D, values: Union[Tensor, Sequence[float]]) -> None:
        super().__init__(grid, values)
        if not bool(torch.all(self.values > 0)) or not bool(
            torch.all(torch.isfinite(self.values))
        ):
            raise DomainError('weight values must be finite and strictly positive')

    @classmethod
    def constant(cls, grid: Grid1D, value: float = 1.0) -> Weight:
        return cls(grid, GridFunction.constant(grid, value).values)


@dataclass(frozen=True)
class ApReport:
    """A_p constant with the interval attaining it (first and last cell)."""

    p: float
    constant: float
    witness_interval: Interval


def prefix_sums(values: Tensor) -> Tensor:
    zero = values.new_zeros(values.shape[:-1] + (1,))
    return torch.cat((zero, values.cumsum(-1)), -1)


def interval_averages(prefix: Tensor, starts: Tensor) -> Tensor:
    r"""Averages over all intervals ``[a, b]`` with ``a`` in ``starts``.

    :param Tensor prefix: prefix sums of length ``n + 1`` (batched along
        leading dimensions)
    :param Tensor starts: interval start cells
    :return: tensor of shape ``(..., len(starts), n)``; entries with ``b < a``
        are NaN
    """
    n = prefix.shape[-1] - 1
    ends = torch.arange(n)
    lengths = (ends.unsqueeze(0) - starts.unsqueeze(1) + 1).to(prefix.dtype)
    sums = prefix[..., 1:].unsqueeze(-2) - prefix[..., starts].unsqueeze(-1)
    averages = sums / lengths
    return torch.where(lengths > 0, averages, torch.full_like(averages, math.nan))


def _interval_log_averages(logs: Tensor, starts: Tensor) -> Tensor:
    """Log-domain counterpart of :func:`interval_averages` built with
    ``logcumsumexp``; entries with ``b < a`` are NaN."""
    n = logs.shape[-1]
    ends = torch.arange(n)
    lengths = (ends.unsqueeze(0) - starts.unsqueeze(1) + 1).to(logs.dtype)
    rows = logs.unsqueeze(0).expand(starts.shape[0], n)
    rows = torch.where(lengths > 0, rows, torch.full_like(rows, -math.inf))
    averages = torch.logcumsumexp(rows, -1) - torch.log(lengths.clamp(min=1.0))
    return torch.where(lengths > 0, averages, torch.full_like(averages, math.nan))


def _weight_values(w: GridFunction) -> Tensor:
    if not isinstance(w, Weight) and not bool(torch.all(w.values > 0)):
        raise DomainError('weight values must be strictly positive')
    return w.values


# dual powers beyond this log-range leave the float64 range
LOG_RANGE_LIMIT = 600.0


def ap_constant(w: GridFunction, p: float, chunk: int = CHUNK) -> ApReport:
    r"""Exact :math:`[w]_{A_p}` over all cell-aligned intervals.

    The product :math:`\langle w\rangle_Q \langle w^{-1/(p-1)}\rangle_Q^{p-1}`
    is evaluated from prefix sums for every interval, scanning start cells in
    chunks; the earliest maximizing interval is reported. The dual weight is
    rescaled by :math:`\min w`, and when its dynamic range exceeds the floating
    point range (``p`` close to 1) the prefix sums are taken in the log domain.

    :param GridFunction w: positive weight
    :param float p: exponent in :math:`(1, \infty)`
    :param int chunk: number of start cells per block
    :rtype: ApReport

    :example:
    >>> grid = Grid1D(0.0, 1.0, 2)
    >>> report = ap_constant(Weight(grid, [2.0, 1.0]), 2.0)
    >>> report.constant, report.witness_interval
    (1.125, (0, 1))
    """
    p = check_exponent(p)
    values = _weight_values(w)
    n = values.shape[0]
    w_min = values.min()
    relative = values / w_min
    exponent = 1.0 / (p - 1.0)
    log_domain = float(torch.log(relative.max())) * exponent > LOG_RANGE_LIMIT

    if log_domain:
        log_w = torch.log(relative)
        log_sigma = -exponent * log_w
    else:
        prefix_w = prefix_sums(relative)
        prefix_sigma = prefix_sums(relative ** (-exponent))

    best = -math.inf
    witness = (0, 0)
    for start in range(0, n, chunk):
        starts = torch.arange(start, min(n, start + chunk))
        if log_domain:
            products = _interval_log_averages(log_w, starts) + (
                p - 1.0
            ) * _interval_log_averages(log_sigma, starts)
        else:
            products = interval_averages(prefix_w, starts) * interval_averages(
                prefix_sigma, starts
            ) ** (p - 1.0)
        products = torch.nan_to_num(products, nan=-math.inf, posinf=math.inf)
        index = int(torch.argmax(products.reshape(-1)))
        value = float(products.reshape(-1)[index])
        if value > best:
            best = value
            witness = (int(starts[index // n]), index % n)
    constant = math.exp(best) if log_domain else best
    return ApReport(p, max(constant, 1.0), witness)


def a1_constant(w: GridFunction, chunk: int = CHUNK) -> ApReport:
    r""":math:`[w]_{A_1} = \sup_Q \langle w\rangle_Q / \min_Q w`, the limit of
    :math:`[w]_{A_p}` as :math:`p \to 1`.

    :example:
    >>> a1_constant(Weight(Grid1D(0.0, 1.0, 2), [2.0, 1.0])).constant
    1.5
    """
    values = _weight_values(w)
    n = values.shape[0]
    relative = values / values.min()
    prefix = prefix_sums(relative)
    best, witness = -math.inf, (0, 0)
    for start in range(0, n, chunk):
        starts = torch.arange(start, min(n, start + chunk))
        before = torch.arange(n).unsqueeze(0) < starts.unsqueeze(1)
        rows = torch.where(
            before, torch.full((1,), math.inf, dtype=relative.dtype), relative
        )
        minima = torch.cummin(rows, -1).values
        ratios = torch.nan_to_num(
            interval_averages(prefix, starts) / minima, nan=-math.inf
        )
        index = int(torch.argmax(ratios.reshape(-1)))
        value = float(ratios.reshape(-1)[index])
        if value > best:
            best = value
            witness = (int(starts[index // n]), index % n)
    return ApReport(1.0, max(best, 1.0), witness)


def dual_weight(w: GridFunction, p: float) -> Weight:
    r"""The weight :math:`\sigma = w^{-1/(p-1)}`, which lies in :math:`A_{p'}`
    with :math:`[\sigma]_{A_{p'}} = [w]_{A_p}^{1/(p-1)}`."""
    p = check_exponent(p)
    return Weight(w.grid, _weight_values(w) ** (-1.0 / (p - 1.0)))


@dataclass(frozen=True)
class OpennessReport:
    """Largest admissible :math:`\\sigma` and the constant
    :math:`[w]_{A_{p/\\sigma}}` it attains."""

    p: float
    budget: float
    sigma: float
    constant: float


def openness_profile(
    w: GridFunction,
    p: float,
    budget_constant: float,
    resolution: float = OPENNESS_RESOLUTION,
) -> OpennessReport:
    r"""Largest :math:`\sigma` on the grid :math:`1 + k\delta < p` with
    :math:`[w]_{A_{p/\sigma}} \le` ``budget_constant``.

    Feasibility is monotone in :math:`\sigma` because :math:`r \mapsto
    [w]_{A_r}` is nonincreasing, so the largest feasible grid point is found by
    bisection. When no grid point above 1 is feasible the limit
    :math:`\sigma = 1` is returned and a warning is logged.

    :raises InfeasibleError: if the budget is below :math:`[w]_{A_p}`
    """
    p = check_exponent(p)
    base = ap_constant(w, p).constant
    if not relative_le(base, budget_constant):
        raise InfeasibleError(
            f'budget {budget_constant} is below [w]_A{p} = {base}'
        )

    def sigma_at(k: int) -> float:
        return round(1.0 + k * resolution, 12)

    cache = {}

    def constant_at(k: int) -> float:
        if k not in cache:
            cache[k] = ap_constant(w, p / sigma_at(k)).constant
        return cache[k]

    def feasible(k: int) -> bool:
        return relative_le(constant_at(k), budget_constant, 1e-12)

    k_max = math.ceil((p - 1.0) / resolution) - 1
    while k_max > 0 and sigma_at(k_max) >= p:
        k_max -= 1
    if k_max <= 0:
        raise DomainError(f'resolution {resolution} is too coarse for p={p}')

    if feasible(k_max):
        low = k_max
    else:
        low, high = 0, k_max
        while high - low > 1:
            middle = (low + high) // 2
            if feasible(middle):
                low = middle
            else:
                high = middle
    if low == 0:
        logger.warning(
            'openness budget %s is met only in the limit sigma -> 1 (p=%s)',
            budget_constant,
            p,
        )
        return OpennessReport(p, budget_constant, 1.0, base)
    logger.debug('openness sigma=%s constant=%s', sigma_at(low), constant_at(low))
    return OpennessReport(p, budget_constant, sigma_at(low), constant_at(low))


def openness_exponent(
    w: GridFunction,
    p: float,
    budget_constant: float,
    resolution: float = OPENNESS_RESOLUTION,
) -> float:
    r"""Return :math:`\sigma \in (1, p)` with :math:`[w]_{A_{p/\sigma}} \le`
    ``budget_constant`` (see :func:`openness_profile`).

    :example:
    >>> grid = Grid1D(0.0, 1.0, 8)
    >>> openness_exponent(Weight.constant(grid), 2.0, 1.0)
    1.999
    """
    return openness_profile(w, p, budget_constant, resolution).sigma


def dual_exponent(p: float) -> float:
    return conjugate(check_exponent(p))
