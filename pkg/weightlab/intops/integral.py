r"""Integral operators with operator-valued kernels

.. math::
    (I_{k,T}f)(t) = h\sum_s k(t - s)\,T(t, s)f(s)

acting on functions from the time grid into :math:`X`.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import torch
from torch import Tensor

from ..core.utils import (
    DTYPE,
    RELATIVE_TOLERANCE,
    DomainError,
    as_tensor,
    check_exponent,
    make_generator,
)
from ..extrapolate.pairs import sample_functions
from ..kernels.kernel import Kernel, convolve_values
from ..kernels.membership import in_class_K
from ..lattice.functions import LatticeFunction
from ..lattice.norms import lattice_space, mixed_norm, reduce_last
from ..maximal.maximal import maximal_values
from ..sbound.family import GENERIC, OperatorFamily
from ..weights.muckenhoupt import Weight
from .evolution import EvolutionFamily

logger = logging.getLogger(__name__)

# absolute slack of the pointwise chain comparisons
CHAIN_FLOOR = 1e-300


class IntegralOperator:
    """Operator :math:`I_{k,T}` on functions from the time grid of ``family``
    into its space.

    :param Kernel kernel: kernel with the cell width of the time grid
    :param EvolutionFamily family: evolution family
    :param bool certified: class-K membership of the kernel; decided with
        :func:`~weightlab.kernels.membership.in_class_K` when None
    """

    def __init__(
        self, kernel: Kernel, family: EvolutionFamily, certified: Optional[bool] = None
    ) -> None:
        if kernel.h != family.time_grid.h:
            raise DomainError(
                f'kernel cell width {kernel.h} differs from the time grid '
                f'{family.time_grid.h}'
            )
        self.kernel = kernel
        self.family = family
        self.certified = (
            in_class_K(kernel).certified if certified is None else bool(certified)
        )
        if not self.certified:
            logger.warning('kernel %s is not certified in class K', kernel.label)

    @property
    def label(self) -> str:
        return f'I[{self.kernel.label}, {self.family.label}]'

    def weights(self) -> Tensor:
        r"""Tensor :math:`h\,k(t-s)\,T(t,s)` of shape ``(n_t, n_t, D, D)``."""
        n = self.family.n_times
        K = self.kernel.matrix(n)
        return self.kernel.h * K.unsqueeze(-1).unsqueeze(-1) * self.family.operators

    def matrix(self) -> Tensor:
        """Dense matrix on the flattened ``(time, space)`` atoms."""
        n = self.family.n_times
        D = self.family.space.dim
        return self.weights().permute(0, 2, 1, 3).reshape(n * D, n * D)

    def __repr__(self) -> str:
        return f'IntegralOperator({self.label}, certified={self.certified})'


def apply_integral_operator(
    op: IntegralOperator, f: Union[LatticeFunction, Tensor]
) -> Union[LatticeFunction, Tensor]:
    r"""Return :math:`(I f)(t) = h\sum_s k(t-s)T(t,s)f(s)`.

    ``f`` is a lattice function on the time grid or a tensor of shape
    ``(..., n_t, *X.shape)``.
    """
    family = op.family
    space = family.space
    if isinstance(f, LatticeFunction):
        if f.grid != family.time_grid or f.space != space:
            raise DomainError('function does not live on the operator domain')
        return f.with_values(apply_integral_operator(op, f.values))
    values = as_tensor(f)
    trailing = (family.n_times,) + space.shape
    n_trailing = len(trailing)
    if values.dim() < n_trailing or tuple(values.shape[-n_trailing:]) != trailing:
        raise DomainError(
            f'tensor of shape {tuple(values.shape)} does not end with {trailing}'
        )
    batch = values.shape[: values.dim() - len(trailing)]
    flat = values.reshape(batch + (family.n_times, space.dim))
    out = torch.einsum('tsij,...sj->...ti', op.weights(), flat)
    return out.reshape(values.shape)


def adjoint_integral_operator(op: IntegralOperator) -> IntegralOperator:
    r"""Adjoint :math:`I_{\tilde k, T^*}` with :math:`\tilde k(x) = k(-x)` and
    :math:`T^*(s, t) = T(t, s)^*`, for the pairing
    :math:`h\sum_t\int f(t)g(t)\,d\mu`."""
    return IntegralOperator(op.kernel.reflect(), op.family.adjoint(), op.certified)


def integral_family(
    operators: Sequence[IntegralOperator], p: float, v: Optional[Weight] = None
) -> OperatorFamily:
    r"""The operators as a family on :math:`L^p(v; X)` over time
    :math:`\times` space."""
    if len(operators) == 0:
        raise DomainError('no integral operators')
    family = operators[0].family
    if any(op.family is not family for op in operators):
        raise DomainError('integral operators must share one evolution family')
    p = check_exponent(p)
    space = lattice_space(family.time_grid, family.space, p, v)
    members = torch.stack([op.matrix() for op in operators])
    return OperatorFamily(
        members, space, labels=[op.kernel.label for op in operators], structure=GENERIC
    )


@dataclass(frozen=True)
class ChainReport:
    r"""Outcome of :func:`uniform_bound_check`.

    The ratios are maxima over samples and time cells of
    :math:`\|If(t)\|_X / (|k| * \|f\|_X)(t)`,
    :math:`(|k| * \|f\|_X)(t) / M(\|f\|_X)(t)` and
    :math:`\|If\|_{L^p(v;X)} / \|M\|f\|_X\|_{L^p(v)}`; ``failed_item`` names
    the first violated inequality.
    """

    passed: bool
    failed_item: Optional[str]
    minkowski_ratio: float
    maximal_ratio: float
    norm_ratio: float
    family_bound: Optional[float]
    trials: int
    seed: int


def _max_ratio(numerator: Tensor, denominator: Tensor) -> float:
    positive = denominator > 0
    if bool((numerator[~positive] > 0).any()):
        return float('inf')
    if not bool(positive.any()):
        return 0.0
    return float((numerator[positive] / denominator[positive]).max())


def _exceeds(left: Tensor, right: Tensor) -> bool:
    scale = torch.maximum(left.abs(), right.abs()).clamp(min=CHAIN_FLOOR)
    return bool((left - right > RELATIVE_TOLERANCE * scale).any())


def uniform_bound_check(
    op: IntegralOperator,
    p: float,
    v: Weight,
    trials: int = 100,
    seed: int = 0,
    rescale: bool = False,
) -> ChainReport:
    r"""Check on seeded samples the pointwise chain

    .. math::
        \|(If)(t)\|_X \le (|k| * \|f(\cdot)\|_X)(t) \le M(\|f(\cdot)\|_X)(t)

    and the norm bound :math:`\|If\|_{L^p(v;X)} \le \|M(\|f\|_X)\|_{L^p(v)}`.

    :param IntegralOperator op: operator with a family bounded by 1
    :param float p: exponent
    :param Weight v: weight on the time grid
    :param int trials: number of sampled functions
    :param int seed: seed of the samples
    :param bool rescale: divide the family by its uniform bound when it
        exceeds 1
    :raises DomainError: if the family bound exceeds 1 and ``rescale`` is off
    """
    p = check_exponent(p)
    family = op.family
    if v.grid != family.time_grid:
        raise DomainError('weight and operator live on different grids')
    bound = family.uniform_bound()
    if bound is None:
        raise DomainError('no uniform bound for a space with mixed exponents')
    if bound > 1.0 + RELATIVE_TOLERANCE:
        if not rescale:
            raise DomainError(f'family bound {bound} exceeds 1; rescale the family')
        op = IntegralOperator(op.kernel, family.scaled(1.0 / bound), op.certified)
    space = family.space
    f = sample_functions(trials, (family.n_times,) + space.shape, seed)
    flips = torch.rand(f.shape, generator=make_generator(seed + 1), dtype=DTYPE)
    f = torch.where(flips < 0.5, -f, f)
    image = apply_integral_operator(op, f)

    pointwise = mixed_norm(image, space)
    fiber = mixed_norm(f, space)
    convolved = convolve_values(op.kernel.abs(), fiber)
    maximal = maximal_values(fiber)

    full = lattice_space(family.time_grid, space, p, v)
    norm_image = mixed_norm(image, full)
    norm_maximal = reduce_last(maximal, family.time_grid.h * v.values, p)

    failed = None
    if _exceeds(pointwise, convolved):
        failed = 'chain-minkowski'
    elif op.certified and _exceeds(convolved, maximal):
        failed = 'chain-maximal'
    elif op.certified and _exceeds(norm_image, norm_maximal):
        failed = 'chain-norm'
    report = ChainReport(
        failed is None,
        failed,
        _max_ratio(pointwise, convolved),
        _max_ratio(convolved, maximal),
        _max_ratio(norm_image, norm_maximal),
        bound,
        trials,
        seed,
    )
    logger.info('%s chain: %s', op.label, 'pass' if report.passed else failed)
    return report
