r"""Sampled verification of weighted extrapolation.

A hypothesis envelope :math:`\hat\alpha` is fitted to the ratios
:math:`\|f\|_{L^{p_0}(w)}/\|g\|_{L^{p_0}(w)}` against :math:`[w]_{A_{p_0}}`.
At every other exponent the conclusion ratios must stay below
:math:`4^n\hat\alpha(c[w]_{A_p}^e)` for some fitted pair :math:`(c, e)`, where
:math:`n \ge 1` counts the lattice axes (the scalar case uses the factor 4).

Verdicts quantify over a finite seeded sample of functions and weights and
are relative to that sample.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import torch

from ..core.logger import write_csv
from ..core.utils import DomainError, check_exponent
from ..lattice.domain import MixedSpace
from ..lattice.norms import lattice_space, mixed_norm
from ..weights.consistency import ConsistencyProfile, fit_consistency_profile
from ..weights.muckenhoupt import Weight, ap_constant
from .pairs import PairGenerator, sample_functions

logger = logging.getLogger(__name__)

HYPOTHESIS = 'hypothesis'

CONCLUSION = 'conclusion'

SHIFTED = 'shifted'

CLASSICAL = 'classical'

FREE_EXPONENTS = [0.25 * k for k in range(1, 17)]

REPORT_HEADER = ['phase', 'p', 'ap_constant', 'ratio']

Sample = Tuple[float, float]


@dataclass(frozen=True)
class ExponentFit:
    r"""Pair :math:`(c, e)` with ratios below
    :math:`\text{factor}\cdot\hat\alpha(c[w]_{A_p}^e)`.

    ``favored`` names the closed form with the smaller mean log slack:
    ``shifted`` for :math:`e = (p_0-1)/(p-1)+1`, ``classical`` for
    :math:`e = \max(1, (p_0-1)/(p-1))`. ``leading_constant`` is the largest
    ratio divided by the envelope value and never exceeds ``factor`` when the
    fit is feasible.
    """

    p: float
    feasible: bool
    c: float
    e: float
    favored: Optional[str]
    leading_constant: float
    mean_log_slack: float


@dataclass(frozen=True)
class ExtrapolationReport:
    """Samples, envelopes, fits and verdict of an extrapolation run."""

    p0: float
    ps: List[float]
    n_axes: int
    factor: float
    hypothesis: List[Sample]
    conclusion: Dict[float, List[Sample]]
    hypothesis_envelope: ConsistencyProfile
    conclusion_envelopes: Dict[float, ConsistencyProfile]
    fits: Dict[float, ExponentFit]
    passed: bool
    n_samples: int
    seed: int
    header: str = field(default='')

    def rows(self) -> List[list]:
        rows = [[HYPOTHESIS, self.p0, x, y] for x, y in self.hypothesis]
        for p in self.ps:
            rows += [[CONCLUSION, p, x, y] for x, y in self.conclusion[p]]
        return rows

    def write(
        self, file_name: Optional[str] = None, extra: Optional[Mapping] = None
    ) -> None:
        """Write the ``phase,p,ap_constant,ratio`` table; ``extra`` adds
        metadata lines."""
        metadata = dict(extra or {})
        metadata.update(
            {
                'p0': self.p0,
                'ps': ','.join(repr(p) for p in self.ps),
                'axes': self.n_axes,
                'samples': self.n_samples,
                'seed': self.seed,
                'verdict': 'pass' if self.passed else 'fail',
                'note': self.header,
                'hypothesis_max_decrease': self.hypothesis_envelope.max_decrease(),
            }
        )
        for p, envelope in self.conclusion_envelopes.items():
            metadata[f'max_decrease[{p!r}]'] = envelope.max_decrease()
        for p, fit in self.fits.items():
            metadata[f'fit[{p!r}]'] = (
                f'c={fit.c!r} e={fit.e!r} favored={fit.favored} '
                f'leading_constant={fit.leading_constant!r}'
                if fit.feasible
                else 'infeasible'
            )
        write_csv(file_name, REPORT_HEADER, self.rows(), metadata)


def named_exponents(p0: float, p: float) -> Dict[str, float]:
    """Closed-form exponent candidates.

    :example:
    >>> named_exponents(2.0, 3.0)
    {'shifted': 1.5, 'classical': 1.0}
    """
    ratio = (p0 - 1.0) / (p - 1.0)
    return {SHIFTED: ratio + 1.0, CLASSICAL: max(1.0, ratio)}


def _fit_for_exponent(
    samples: List[Sample], envelope: ConsistencyProfile, factor: float, e: float
) -> Optional[Tuple[float, float, float]]:
    c = 0.0
    for x, ratio in samples:
        threshold = envelope.inverse(ratio / factor)
        if threshold is None:
            return None
        if threshold != -math.inf:
            c = max(c, threshold / x**e)
    slacks, leading = [], 0.0
    for x, ratio in samples:
        level = envelope(c * x**e)
        if level > 0:
            leading = max(leading, ratio / level)
        if ratio > 0 and level > 0:
            slacks.append(math.log(factor * level / ratio))
    slack = float(np.mean(slacks)) if slacks else 0.0
    return c, leading, slack


def fit_exponents(
    p0: float,
    p: float,
    samples: List[Sample],
    envelope: ConsistencyProfile,
    factor: float,
) -> ExponentFit:
    r"""Fit :math:`(c, e)` over the named exponents and a free grid.

    For each exponent the smallest feasible :math:`c` is used; the pair with
    the smallest mean log slack is reported.
    """
    named = named_exponents(p0, p)
    candidates = list(named.values()) + FREE_EXPONENTS
    fits = {e: _fit_for_exponent(samples, envelope, factor, e) for e in candidates}
    feasible = [(e, fit) for e, fit in fits.items() if fit is not None]
    if not feasible:
        return ExponentFit(p, False, math.nan, math.nan, None, math.inf, math.nan)
    e, (c, leading, slack) = min(feasible, key=lambda item: item[1][2])
    favored = None
    shifted, classical = fits[named[SHIFTED]], fits[named[CLASSICAL]]
    if shifted is not None and classical is not None:
        if shifted[2] < classical[2]:
            favored = SHIFTED
        elif classical[2] < shifted[2]:
            favored = CLASSICAL
    elif shifted is not None:
        favored = SHIFTED
    elif classical is not None:
        favored = CLASSICAL
    return ExponentFit(p, True, c, e, favored, leading, slack)


def _ratios(
    f: torch.Tensor, g: torch.Tensor, space: MixedSpace, p: float, w: Weight
) -> float:
    full = lattice_space(w.grid, space, p, w)
    denominators = mixed_norm(g, full)
    if not bool(torch.all(denominators > 0)):
        raise DomainError('degenerate generator: g vanishes identically')
    return float((mixed_norm(f, full) / denominators).max())


def _verify(
    generator: PairGenerator,
    p0: float,
    ps: Sequence[float],
    weights: Sequence[Weight],
    space: MixedSpace,
    seed: int,
    n_samples: int,
) -> ExtrapolationReport:
    p0 = check_exponent(p0, 'p0')
    ps = [check_exponent(p) for p in ps]
    if len(ps) == 0:
        raise DomainError('no conclusion exponents')
    if len(weights) < 2:
        raise DomainError(f'at least 2 weights are required, got {len(weights)}')
    grid = weights[0].grid
    if any(w.grid != grid for w in weights):
        raise DomainError('weights live on different grids')

    g = sample_functions(n_samples, (grid.n_cells,) + space.shape, seed)
    f, g = generator.pairs(g)
    if f.shape != g.shape:
        raise DomainError(
            f'generator returned f of shape {tuple(f.shape)} '
            f'for g of shape {tuple(g.shape)}'
        )

    def sample(p):
        return [
            (ap_constant(w, p).constant, _ratios(f, g, space, p, w)) for w in weights
        ]

    factor = 4.0 ** max(space.n_axes, 1)
    hypothesis = sample(p0)
    alpha = fit_consistency_profile(hypothesis)
    conclusion, envelopes, fits = {}, {}, {}
    for p in ps:
        conclusion[p] = sample(p)
        envelopes[p] = fit_consistency_profile(conclusion[p])
        fits[p] = fit_exponents(p0, p, conclusion[p], alpha, factor)
        logger.info(
            'p=%s: max ratio %s, fit %s',
            p,
            max(y for _, y in conclusion[p]),
            fits[p],
        )
    passed = all(math.isfinite(y) for _, y in hypothesis) and (
        all(math.isfinite(y) for p in ps for _, y in conclusion[p])
        and all(fit.feasible for fit in fits.values())
    )
    header = (
        f'results relative to the sample of {n_samples} functions '
        f'and {len(weights)} weights (seed {seed})'
    )
    return ExtrapolationReport(
        p0,
        ps,
        space.n_axes,
        factor,
        hypothesis,
        conclusion,
        alpha,
        envelopes,
        fits,
        passed,
        n_samples,
        seed,
        header,
    )


def verify_extrapolation_pair(
    generator: PairGenerator,
    p0: float,
    ps: Sequence[float],
    weights: Sequence[Weight],
    seed: int = 0,
    n_samples: int = 64,
) -> ExtrapolationReport:
    r"""Check scalar extrapolation from :math:`p_0` to every :math:`p` in ``ps``.

    :param PairGenerator generator: maps samples ``g`` to pairs ``(f, g)``
    :param float p0: hypothesis exponent
    :param ps: conclusion exponents
    :param weights: at least two weights on a common grid
    :param int seed: seed of the sampled functions
    :param int n_samples: number of sampled functions, shared by every
        exponent
    """
    return _verify(generator, p0, ps, weights, MixedSpace([], []), seed, n_samples)


def verify_mixed_extrapolation(
    generator: PairGenerator,
    p0: float,
    ps: Sequence[float],
    space: MixedSpace,
    weights: Sequence[Weight],
    seed: int = 0,
    n_samples: int = 64,
) -> ExtrapolationReport:
    r"""Mixed-norm version of :func:`verify_extrapolation_pair` on
    :math:`L^p(w; L^{\bar q}(\Omega))`.

    Pairs are built fiberwise, so the scalar hypothesis holds for every
    fiber. With no axes this is the scalar verifier.
    """
    return _verify(generator, p0, ps, weights, space, seed, n_samples)
