r"""Desk-scale experiments on families of integral operators.

For every weight :math:`v` the certified kernels give a finite family
:math:`\{I_{k,T}\}` on :math:`L^p(v; L^q)`. Its :math:`\ell^s`-bounds are
estimated from below, with upper certificates where one is available, and
the pointwise domination chain is checked for every operator.

For multiplication families :math:`T` the bound
:math:`R^s(I_T) \le R^s(T)\,\hat\alpha([v]_{A_{p/s}})` is certified with
:math:`\hat\alpha` the monotone envelope of
:math:`\|\kappa *\|_{B(L^{p/s}(v))}^{1/s}`, where :math:`\kappa` is the
pointwise maximum of the kernels.
"""

from __future__ import annotations

import logging
import math
import os
from typing import Dict, List, Optional, Sequence

import torch

from ..core.logger import write_csv
from ..core.runnable import Runnable
from ..core.serializable import JSONSerializable
from ..core.utils import (
    DomainError,
    check_exponent,
    process_object,
    process_objects,
    register_class,
    validate,
)
from ..kernels.kernel import Kernel
from ..kernels.membership import in_class_K
from ..lattice.domain import Grid1D, MeasuredAxis, MixedSpace, parse_exponent
from ..sbound.family import MULTIPLICATION, operator_norm_bound
from ..sbound.rademacher import rademacher_bound_estimate
from ..sbound.search import (
    SearchOptions,
    UpperCertificate,
    check_sandwich,
    estimate_ls_bound,
)
from ..typing import ID
from ..weights.consistency import fit_consistency_profile
from ..weights.generators import PowerWeightFamily
from ..weights.muckenhoupt import Weight, a1_constant, ap_constant
from .evolution import EvolutionFamily, evolution_family_from_json
from .integral import IntegralOperator, integral_family, uniform_bound_check

logger = logging.getLogger(__name__)

BOUNDS_HEADER = ['s', 'ap_constant', 'lower', 'upper', 'certificate_kind']

CHAIN_HEADER = [
    'kernel',
    'ap_constant',
    'passed',
    'minkowski_ratio',
    'maximal_ratio',
    'norm_ratio',
]

RADEMACHER_HEADER = ['ap_constant', 'lower']

STRUCTURED = 'structured'


def kernel_majorant(kernels: Sequence[Kernel]) -> Kernel:
    """Pointwise maximum of :math:`|k|` over kernels sharing a cell width."""
    radius = max(k.radius for k in kernels)
    padded = []
    for k in kernels:
        pad = radius - k.radius
        padded.append(torch.nn.functional.pad(k.values.abs(), (pad, pad)))
    return Kernel(torch.stack(padded).amax(0), kernels[0].h, 'majorant')


def ap_abscissa(v: Weight, exponent: float) -> float:
    """:math:`[v]_{A_r}` with the :math:`A_1` constant at ``exponent`` 1."""
    if exponent == 1.0:
        return a1_constant(v).constant
    return ap_constant(v, exponent).constant


def convolution_norm(kernel: Kernel, v: Weight, exponent: float) -> float:
    r"""Upper bound of :math:`\|f \mapsto |k| * f\|_{B(L^r(v))}`."""
    grid = v.grid
    space = MixedSpace([MeasuredAxis(grid.h * v.values)], [exponent])
    matrix = kernel.h * kernel.abs().matrix(grid.n_cells)
    return operator_norm_bound(matrix, space, space)


def structured_certificates(
    family: EvolutionFamily,
    kernels: Sequence[Kernel],
    weights: Sequence[Weight],
    p: float,
    q: float,
    s: float,
) -> Optional[List[UpperCertificate]]:
    r"""Certificates :math:`R^s(T)\,\hat\alpha([v]_{A_{p/s}})` per weight, or
    None when :math:`T` is not a multiplication family or
    :math:`s > \min(p, q)`."""
    if family.structure != MULTIPLICATION or s > min(p, q):
        return None
    exponent = p / s
    majorant = kernel_majorant(kernels)
    samples = [
        (
            ap_abscissa(v, exponent),
            convolution_norm(majorant, v, exponent) ** (1.0 / s),
        )
        for v in weights
    ]
    if len(samples) >= 2:
        envelope = fit_consistency_profile(samples)
        alphas = [envelope(x) for x, _ in samples]
    else:
        alphas = [alpha for _, alpha in samples]
    bound = family.multiplier_bound()
    return [UpperCertificate(bound * alpha, STRUCTURED) for alpha in alphas]


@register_class
class TheoremExperiment(JSONSerializable, Runnable):
    r"""Estimate :math:`\ell^s`- and Rademacher bounds of integral operator
    families over a set of weights and write the tables.

    :param Grid1D time_grid: time grid
    :param kernels: candidate kernels; uncertified ones are dropped
    :param dict family: evolution family section (see
        :func:`~weightlab.intops.evolution.evolution_family_from_json`)
    :param float p: time exponent
    :param float q: space exponent
    :param s: exponents of the :math:`\ell^s`-bounds
    :param PowerWeightFamily weights: weights :math:`v`
    :param SearchOptions options: search knobs
    :param int seed: seed of every random draw
    :param bool rademacher: also estimate R-bounds
    :param int chain_trials: sampled functions per chain check
    :param str out_dir: output directory
    """

    def __init__(
        self,
        id_: ID,
        time_grid: Grid1D,
        kernels: Sequence[Kernel],
        family: dict,
        p: float,
        q: float,
        s: Sequence[float],
        weights: PowerWeightFamily,
        options: Optional[SearchOptions] = None,
        seed: int = 0,
        rademacher: bool = True,
        chain_trials: int = 32,
        out_dir: Optional[str] = None,
    ) -> None:
        if len(kernels) == 0:
            raise DomainError('no kernels')
        if len(s) == 0:
            raise DomainError('no s exponents')
        self.id = id_
        self.time_grid = time_grid
        self.kernels = list(kernels)
        self.family_config = dict(family)
        self.p = check_exponent(p)
        self.q = check_exponent(q, 'q', allow_inf=True, inclusive=True)
        self.s = [check_exponent(x, 's', allow_inf=True, inclusive=True) for x in s]
        self.weights = weights
        self.options = options or SearchOptions()
        self.seed = int(seed)
        self.rademacher = rademacher
        self.chain_trials = chain_trials
        self.out_dir = out_dir
        self.results: Dict[str, list] = {}

    def certified_operators(self, family: EvolutionFamily) -> List[IntegralOperator]:
        certified = [k for k in self.kernels if in_class_K(k, seed=self.seed).certified]
        for k in self.kernels:
            if k not in certified:
                logger.warning('dropping kernel %s: not certified in class K', k.label)
        if len(certified) == 0:
            raise DomainError('no certified kernels in the subset')
        return [IntegralOperator(k, family, True) for k in certified]

    def run(self, out_dir: Optional[str] = None, seed: Optional[int] = None) -> bool:
        out_dir = out_dir if out_dir is not None else self.out_dir
        seed = self.seed if seed is None else int(seed)
        family = evolution_family_from_json(
            self.family_config, self.time_grid, self.q, seed
        )
        operators = self.certified_operators(family)
        kernels = [op.kernel for op in operators]
        weights = self.weights.weights(self.time_grid)
        structured = {
            s: structured_certificates(family, kernels, weights, self.p, self.q, s)
            for s in self.s
        }

        bounds, chains, rademacher = [], [], []
        passed = True
        for index, v in enumerate(weights):
            ap = ap_constant(v, self.p).constant
            for op in operators:
                chain = uniform_bound_check(
                    op, self.p, v, self.chain_trials, seed, rescale=True
                )
                passed = passed and chain.passed
                chains.append(
                    [
                        op.kernel.label,
                        ap,
                        chain.passed,
                        chain.minkowski_ratio,
                        chain.maximal_ratio,
                        chain.norm_ratio,
                    ]
                )
            lattice_family = integral_family(operators, self.p, v)
            for s in self.s:
                extra = [] if structured[s] is None else [structured[s][index]]
                estimate = estimate_ls_bound(
                    lattice_family,
                    s,
                    seed=seed,
                    options=self.options,
                    certificates=extra,
                )
                if extra:
                    check_sandwich('structured-sandwich', estimate.lower, extra[0])
                certificate = estimate.upper_certificate
                bounds.append(
                    [
                        s,
                        ap,
                        estimate.lower,
                        math.nan if certificate is None else certificate.value,
                        'none' if certificate is None else certificate.provenance,
                    ]
                )
            if self.rademacher:
                estimate = rademacher_bound_estimate(
                    lattice_family,
                    self.options.restarts,
                    self.options.n_max,
                    seed,
                    self.options,
                )
                rademacher.append([ap, estimate.value])

        self.results = {'bounds': bounds, 'chains': chains, 'rademacher': rademacher}
        if out_dir is not None:
            self.write(out_dir, family, seed)
        return passed

    def metadata(self, family: EvolutionFamily, seed: int) -> dict:
        return {
            'family': family.label,
            'kernels': ','.join(k.label for k in self.kernels),
            'p': self.p,
            'q': self.q,
            's': ','.join(repr(s) for s in self.s),
            'weights': ','.join(repr(a) for a in self.weights.exponents),
            'n_times': self.time_grid.n_cells,
            'semigroup_defect': family.semigroup_defect(),
            'seed': seed,
        }

    def write(self, out_dir: str, family: EvolutionFamily, seed: int) -> None:
        from ..cli.plot import emit_plot

        os.makedirs(out_dir, exist_ok=True)
        metadata = self.metadata(family, seed)
        write_csv(
            os.path.join(out_dir, 'bounds.csv'),
            BOUNDS_HEADER,
            self.results['bounds'],
            metadata,
        )
        write_csv(
            os.path.join(out_dir, 'chain.csv'),
            CHAIN_HEADER,
            self.results['chains'],
            metadata,
        )
        if self.rademacher:
            write_csv(
                os.path.join(out_dir, 'rademacher.csv'),
                RADEMACHER_HEADER,
                self.results['rademacher'],
                metadata,
            )
        series = {}
        for s, ap, lower, _, _ in self.results['bounds']:
            series.setdefault(f'[v]={ap:.4g}', []).append((s, lower))
        emit_plot(series, os.path.join(out_dir, 'lower.svg'))

    @classmethod
    def from_json(cls, data, dic) -> TheoremExperiment:
        r"""Create a TheoremExperiment object.

        **JSON attributes**:

         Mandatory:
          - time_grid (Grid1D): time grid.
          - kernels (list): Kernel objects or references.
          - family (dict): evolution family section.
          - exponents (dict): p, q and s (list).
          - weights (PowerWeightFamily): weights v.

         Optional:
          - search (SearchOptions): search knobs.
          - seed (int): seed (default: 0).
          - rademacher (bool): estimate R-bounds (default: true).
          - chain_trials (int): samples per chain check (default: 32).
          - out_dir (str): output directory.
        """
        validate(
            data,
            {
                'time_grid': {'type': 'object|string'},
                'kernels': {'type': 'object|string', 'list': True},
                'family': {'type': 'object'},
                'exponents': {'type': 'object'},
                'weights': {'type': 'object|string'},
                'search': {'type': 'object|string', 'optional': True},
                'seed': {'type': 'int', 'optional': True},
                'rademacher': {'type': 'bool', 'optional': True},
                'chain_trials': {'type': 'int', 'optional': True},
                'out_dir': {'type': 'string', 'optional': True},
            },
        )
        exponents = data['exponents']
        validate(
            exponents,
            {
                'p': {'type': 'number'},
                'q': {'type': 'number|string'},
                's': {'type': 'number', 'list': True},
            },
        )
        time_grid = process_object(data['time_grid'], dic)
        kernels = process_objects(data['kernels'], dic, force_list=True)
        weights = process_object(data['weights'], dic)
        options = process_object(data['search'], dic) if 'search' in data else None
        return cls(
            data['id'],
            time_grid,
            kernels,
            data['family'],
            exponents['p'],
            parse_exponent(exponents['q']),
            exponents['s'],
            weights,
            options,
            data.get('seed', 0),
            data.get('rademacher', True),
            data.get('chain_trials', 32),
            data.get('out_dir'),
        )
