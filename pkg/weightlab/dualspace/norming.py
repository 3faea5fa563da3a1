r"""Duality of iterated Lebesgue spaces.

For :math:`g \in L^{\bar q'}(\Omega)` the norming function

.. math::
    f = \operatorname{sign}(g)\,|g|^{q'_n - 1}
        \prod_{i=2}^{n} N_i^{q'_{i-1} - q'_i},

with :math:`N_i` the norm of :math:`g` over the axes :math:`i, \dots, n`,
satisfies :math:`\int fg\,d\mu = \|g\|^{q'_1}` and
:math:`\|f\|_{L^{\bar q}} = \|g\|^{q'_1 - 1}`, hence equality in Hölder's
inequality. Fibers on which an inner norm vanishes are set to zero.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import torch
from torch import Tensor

from ..core.utils import (
    DTYPE,
    RELATIVE_TOLERANCE,
    DomainError,
    PropertyCheckError,
    as_tensor,
    check_exponent,
    make_generator,
)
from ..lattice.domain import MeasuredAxis, MixedSpace
from ..lattice.norms import mixed_norm, reduce_last
from ..sbound.family import check_dual_exponents

logger = logging.getLogger(__name__)

HOLDER_TOLERANCE = 1e-8

TIGHTNESS_TOLERANCE = 1e-12


@dataclass(frozen=True)
class NormingWitness:
    r"""Pair :math:`(g, f)` with :math:`\int fg\,d\mu = \|f\|_{\bar q}
    \|g\|_{\bar q'}`."""

    g: Tensor
    f: Tensor
    pairing: float
    dual_norm: float
    norm: float


def pairing(f: Tensor, g: Tensor, space: MixedSpace) -> Tensor:
    r""":math:`\int fg\,d\mu` over the trailing dimensions."""
    product = f * g * space.masses()
    batch = product.shape[: product.dim() - space.n_axes]
    return product.reshape(batch + (-1,)).sum(-1)


def _relative_gap(a: float, b: float) -> float:
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def norming_function(g: Union[Tensor, list], space: MixedSpace) -> NormingWitness:
    r"""Norming function in :math:`L^{\bar q}` of ``g`` in the dual space.

    :param g: tensor of shape ``space.shape``, not identically zero
    :param MixedSpace space: the space :math:`L^{\bar q}` with exponents in
        :math:`(1, \infty)`
    :raises PropertyCheckError: if one of the two identities fails

    :example:
    >>> space = MixedSpace.counting([2], [2])
    >>> witness = norming_function([3.0, 4.0], space)
    >>> witness.f.tolist(), round(witness.pairing, 12)
    ([3.0, 4.0], 25.0)
    """
    check_dual_exponents(space)
    g = as_tensor(g)
    if tuple(g.shape) != space.shape:
        raise DomainError(f'g of shape {tuple(g.shape)} does not match {space.shape}')
    if not bool(g.any()):
        raise DomainError('g must not vanish identically')
    dual = space.dual()
    q_dual = dual.exponents
    n = space.n_axes

    f = torch.sign(g) * g.abs() ** (q_dual[-1] - 1.0)
    for i in range(1, n):
        inner = MixedSpace(dual.axes[i:], q_dual[i:])
        norms = mixed_norm(g, inner)
        power = q_dual[i - 1] - q_dual[i]
        factor = torch.where(
            norms > 0, norms.clamp(min=1e-300) ** power, torch.zeros_like(norms)
        )
        f = f * factor.reshape(norms.shape + (1,) * (n - i))

    dual_norm = float(mixed_norm(g, dual))
    value = float(pairing(f, g, space))
    norm = float(mixed_norm(f, space))
    expected_pairing = dual_norm ** q_dual[0]
    expected_norm = dual_norm ** (q_dual[0] - 1.0)
    if _relative_gap(value, expected_pairing) > HOLDER_TOLERANCE:
        raise PropertyCheckError(
            'norming-pairing', f'pairing {value} differs from {expected_pairing}'
        )
    if _relative_gap(norm, expected_norm) > HOLDER_TOLERANCE:
        raise PropertyCheckError(
            'norming-norm', f'norm {norm} differs from {expected_norm}'
        )
    return NormingWitness(g, f, value, dual_norm, norm)


@dataclass(frozen=True)
class DualityReport:
    """Sampled supremum of :math:`|\\int fg|/\\|f\\|` against the dual norm
    and the value attained by the norming witness."""

    sampled_max: float
    witness_value: float
    dual_norm: float
    gap: float
    holder_ok: bool
    trials: int
    seed: int


def verify_duality_pairing(
    g: Union[Tensor, list], space: MixedSpace, trials: int = 1000, seed: int = 0
) -> DualityReport:
    r"""Compare :math:`\sup_f |\int fg|/\|f\|_{\bar q}` over seeded random
    :math:`f` with :math:`\|g\|_{\bar q'}` and with the norming witness.

    ``gap`` is the dual norm minus the sampled maximum.
    """
    if trials < 1:
        raise DomainError(f'trials must be >= 1, got {trials}')
    check_dual_exponents(space)
    g = as_tensor(g)
    if tuple(g.shape) != space.shape:
        raise DomainError(f'g of shape {tuple(g.shape)} does not match {space.shape}')
    dual_norm = float(mixed_norm(g, space.dual()))
    if dual_norm == 0.0:
        return DualityReport(0.0, 0.0, 0.0, 0.0, True, trials, seed)

    generator = make_generator(seed)
    fs = torch.randn((trials,) + space.shape, generator=generator, dtype=DTYPE)
    ratios = pairing(fs, g, space).abs() / mixed_norm(fs, space)
    sampled_max = float(ratios.max())
    witness = norming_function(g, space)
    witness_value = abs(witness.pairing) / witness.norm
    holder_ok = sampled_max <= dual_norm * (1.0 + RELATIVE_TOLERANCE)
    return DualityReport(
        sampled_max,
        witness_value,
        dual_norm,
        dual_norm - sampled_max,
        holder_ok,
        trials,
        seed,
    )


@dataclass(frozen=True)
class TupleDualityReport:
    r"""Norm comparisons of :math:`X(\ell^1_N)`, :math:`X(\ell^r_N)` and
    :math:`X(\ell^\infty_N)`.

    ``identical`` holds the ratios :math:`\ell^1/\ell^r` and
    :math:`\ell^r/\ell^\infty` of a tuple with identical entries (exactly
    :math:`N^{1-1/r}` and :math:`N^{1/r}`), ``disjoint`` those of a tuple with
    disjoint supports (None when :math:`N` exceeds the number of atoms).
    ``dual_witness_gap`` is the relative Hölder gap of the norming witness of
    :math:`X(\ell^r_N)` viewed as a mixed space (None outside
    :math:`(1, \infty)`).
    """

    N: int
    r: float
    passed: bool
    chains_ok: bool
    worst_slack: float
    identical: Tuple[float, float]
    disjoint: Optional[Tuple[float, float]]
    dual_witness_gap: Optional[float]


def _tuple_norms(fs: Tensor, r: float, space: MixedSpace) -> Tensor:
    return mixed_norm(reduce_last(fs.movedim(-space.n_axes - 1, -1), None, r), space)


def _ratios(fs: Tensor, r: float, space: MixedSpace) -> Tuple[float, float]:
    one = float(_tuple_norms(fs, 1.0, space))
    middle = float(_tuple_norms(fs, r, space))
    top = float(_tuple_norms(fs, math.inf, space))
    return one / middle, middle / top


def tuple_space(space: MixedSpace, N: int, r: float) -> MixedSpace:
    r""":math:`X(\ell^r_N)` as a mixed space with an innermost counting
    axis."""
    return space.append(MeasuredAxis.counting(N), r)


def tuple_duality_constants(
    space: MixedSpace, N: int, r: float, trials: int = 1000, seed: int = 0
) -> TupleDualityReport:
    r"""Check :math:`\|f\|_{X(\ell^\infty)} \le \|f\|_{X(\ell^r)} \le
    N^{1/r}\|f\|_{X(\ell^\infty)}` and :math:`\|f\|_{X(\ell^r)} \le
    \|f\|_{X(\ell^1)} \le N^{1-1/r}\|f\|_{X(\ell^r)}` on seeded random tuples
    and evaluate the tightness witnesses.

    :param MixedSpace space: the lattice :math:`X`
    :param int N: tuple length
    :param float r: exponent in :math:`[1, \infty]`
    :raises PropertyCheckError: if the identical-entry witness misses its
        constant
    """
    if N < 1:
        raise DomainError(f'N must be >= 1, got {N}')
    r = check_exponent(r, 'r', allow_inf=True, inclusive=True)
    upper_r = N ** (1.0 / r)
    upper_one = N ** (1.0 - 1.0 / r)

    generator = make_generator(seed)
    fs = torch.randn((trials, N) + space.shape, generator=generator, dtype=DTYPE)
    one = _tuple_norms(fs, 1.0, space)
    middle = _tuple_norms(fs, r, space)
    top = _tuple_norms(fs, math.inf, space)
    slacks = torch.stack(
        [
            top - middle,
            middle - upper_r * top,
            middle - one,
            one - upper_one * middle,
        ]
    ) / torch.maximum(one, torch.ones_like(one))
    worst_slack = float(slacks.max())
    chains_ok = worst_slack <= RELATIVE_TOLERANCE

    g = torch.randn(space.shape, generator=generator, dtype=DTYPE)
    if not bool(g.any()):
        g = torch.ones(space.shape, dtype=DTYPE)
    identical = _ratios(g.expand((N,) + space.shape), r, space)
    if (
        _relative_gap(identical[0], upper_one) > TIGHTNESS_TOLERANCE
        or _relative_gap(identical[1], upper_r) > TIGHTNESS_TOLERANCE
    ):
        raise PropertyCheckError(
            'tuple-tightness',
            f'identical entries give {identical}, expected ({upper_one}, {upper_r})',
        )

    disjoint = None
    if N <= space.dim:
        atoms = torch.eye(space.dim, dtype=DTYPE)[:N].reshape((N,) + space.shape)
        disjoint = _ratios(atoms, r, space)

    dual_witness_gap = None
    if 1.0 < r < math.inf and all(1.0 < q < math.inf for q in space.exponents):
        extended = tuple_space(space, N, r)
        tuple_values = torch.randn(extended.shape, generator=generator, dtype=DTYPE)
        witness = norming_function(tuple_values, extended)
        dual_witness_gap = _relative_gap(
            witness.pairing, witness.norm * witness.dual_norm
        )
    logger.info('tuple duality N=%d r=%s: chains %s', N, r, chains_ok)
    return TupleDualityReport(
        N,
        r,
        chains_ok,
        chains_ok,
        worst_slack,
        identical,
        disjoint,
        dual_witness_gap,
    )
