"""Acceptance battery run by ``weightlab suite``.

Every criterion returns a short detail string or raises
:class:`~weightlab.core.utils.PropertyCheckError` naming the failing item.
All randomness is drawn from generators seeded with the suite seed, so a rerun
writes the same bytes.
"""

from __future__ import annotations

import filecmp
import logging
import math
import os
import tempfile
import time
from dataclasses import dataclass
from typing import Callable, List, Tuple

import torch

from ..core.logger import write_csv
from ..core.utils import (
    DTYPE,
    RELATIVE_TOLERANCE,
    SANDWICH_TOLERANCE,
    DomainError,
    PropertyCheckError,
    conjugate,
    make_generator,
    relative_le,
)
from ..dualspace.norming import (
    HOLDER_TOLERANCE,
    norming_function,
    tuple_duality_constants,
)
from ..extrapolate.pairs import MaximalPairs, grid_maximal, sample_functions
from ..extrapolate.rdf import rdf_iterate
from ..extrapolate.verify import verify_extrapolation_pair, verify_mixed_extrapolation
from ..intops.evolution import heat_evolution_family
from ..intops.experiment import TheoremExperiment
from ..intops.integral import IntegralOperator, integral_family, uniform_bound_check
from ..kernels.catalog import box, exponential, gaussian, one_sided_exponential
from ..kernels.kernel import Kernel
from ..kernels.membership import REFUTED, domination_gap, in_class_K
from ..lattice.domain import Grid1D, MixedSpace
from ..lattice.functions import GridFunction
from ..lattice.norms import lattice_space, mixed_norm, weighted_lp_norm
from ..maximal.maximal import maximal_reference, maximal_values
from ..sbound.certificates import duality_certificate, interpolation_certificate
from ..sbound.family import MULTIPLICATION, WEIGHTED_COMPOSITION, adjoint_family
from ..sbound.rademacher import rademacher_bound_estimate
from ..sbound.search import SearchOptions, estimate_ls_bound
from ..sbound.structured import random_structured_family, structured_ls_bound
from ..weights.consistency import fit_consistency_profile
from ..weights.generators import (
    PowerWeightFamily,
    power_weight,
    power_weights,
    random_weight,
)
from ..weights.muckenhoupt import ap_constant, dual_weight
from .utils import THREADS_VARIABLE, configure_threads

logger = logging.getLogger(__name__)

SUITE_HEADER = ['criterion', 'status', 'detail']

PASS = 'pass'
FAIL = 'fail'
ERROR = 'error'

POWER_EXPONENTS = (0.0, 0.3, 0.6, 0.9)

SHAPE_GRID = (1.25, 1.5, 2.0, 3.0, 4.0, 8.0)

# relative slack of the monotone shape of exact bounds
SHAPE_TOLERANCE = 1e-4

# largest relative change of a sampled maximum when the sample doubles
STABILITY = 0.1

SEARCH_FRACTION = 0.9

# largest relative gap between the estimates at s and on the adjoint at s'
ADJOINT_AGREEMENT = 0.05


@dataclass(frozen=True)
class SuiteSize:
    """Sample sizes of the acceptance battery."""

    weights: int
    ap_cells: Tuple[int, ...]
    maximal_samples: int
    kernel_trials: int
    lattice_samples: int
    rdf_cases: int
    extrapolation_cells: int
    extrapolation_samples: int
    structured_families: int
    shape_families: int
    search: SearchOptions
    time_cells: int
    space_cells: int
    chain_trials: int
    rademacher_restarts: int
    norming_samples: int
    tuple_trials: int


SIZES = {
    'small': SuiteSize(
        weights=20,
        ap_cells=(16, 64),
        maximal_samples=100,
        kernel_trials=1000,
        lattice_samples=200,
        rdf_cases=20,
        extrapolation_cells=32,
        extrapolation_samples=32,
        structured_families=8,
        shape_families=10,
        search=SearchOptions(n_max=4, restarts=8, iterations=100),
        time_cells=16,
        space_cells=4,
        chain_trials=16,
        rademacher_restarts=4,
        norming_samples=30,
        tuple_trials=200,
    ),
    'full': SuiteSize(
        weights=200,
        ap_cells=(16, 64, 256),
        maximal_samples=100,
        kernel_trials=1000,
        lattice_samples=1000,
        rdf_cases=100,
        extrapolation_cells=64,
        extrapolation_samples=64,
        structured_families=20,
        shape_families=10,
        search=SearchOptions(n_max=6, restarts=32, iterations=200),
        time_cells=64,
        space_cells=16,
        chain_trials=32,
        rademacher_restarts=8,
        norming_samples=100,
        tuple_trials=1000,
    ),
}


def _relative_gap(a: float, b: float) -> float:
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def ap_duality(size: SuiteSize, seed: int) -> str:
    generator = make_generator(seed)
    worst = 0.0
    for n in size.ap_cells:
        grid = Grid1D(0.0, 1.0, n)
        for _ in range(size.weights):
            w = random_weight(grid, generator)
            for p in (1.5, 2.0, 3.0):
                expected = ap_constant(w, p).constant ** (1.0 / (p - 1.0))
                dual = ap_constant(dual_weight(w, p), conjugate(p)).constant
                gap = _relative_gap(dual, expected)
                worst = max(worst, gap)
                if gap > RELATIVE_TOLERANCE:
                    raise PropertyCheckError(
                        'ap-duality',
                        f'[dual]_A{conjugate(p)} = {dual} but '
                        f'[w]_A{p}^(1/(p-1)) = {expected} (n={n})',
                    )
    return f'worst relative gap {worst:.3g}'


def ap_monotonicity(size: SuiteSize, seed: int) -> str:
    generator = make_generator(seed)
    grid = Grid1D(0.0, 1.0, size.ap_cells[-1])
    ps = (1.5, 2.0, 3.0, 5.0)
    for index in range(size.weights):
        w = random_weight(grid, generator)
        constants = [ap_constant(w, p).constant for p in ps]
        for p, q, low, high in zip(ps, ps[1:], constants, constants[1:]):
            if not relative_le(high, low):
                raise PropertyCheckError(
                    'ap-monotonicity',
                    f'weight {index}: [w]_A{q} = {high} > [w]_A{p} = {low}',
                )
    return f'{size.weights} weights ordered across p in {list(ps)}'


def maximal_oracle(size: SuiteSize, seed: int) -> str:
    example = maximal_values(torch.tensor([0.0, 4.0, 0.0, 0.0], dtype=DTYPE))
    if example.tolist() != [2.0, 4.0, 2.0, 4.0 / 3.0]:
        raise PropertyCheckError('maximal-example', f'M(0,4,0,0) = {example}')
    generator = make_generator(seed)
    for index in range(size.maximal_samples):
        n = int(torch.randint(1, 65, (1,), generator=generator))
        values = torch.rand(n, generator=generator, dtype=DTYPE)
        if index % 2 == 1:
            spikes = values.clamp(min=1e-3) ** -1
            values = torch.where(values < 0.2, spikes, torch.zeros_like(values))
        if not torch.equal(maximal_values(values), maximal_reference(values)):
            raise PropertyCheckError(
                'maximal-oracle', f'sample {index} (n={n}) differs from brute force'
            )
    return f'{size.maximal_samples} samples identical to brute force'


def class_k_kernels(h: float) -> List[Kernel]:
    return [
        gaussian(0.01, h),
        box(3, h),
        exponential(20.0, h),
        one_sided_exponential(20.0, h),
        one_sided_exponential(20.0, h, normalization='total'),
    ]


def class_k_soundness(size: SuiteSize, seed: int) -> str:
    h = 1.0 / 64
    worst = -math.inf
    for k in class_k_kernels(h):
        verdict = in_class_K(k, seed=seed)
        if not verdict.certified:
            raise PropertyCheckError(
                'class-k-certificate', f'{k.label} is {verdict.status}'
            )
        n = max(2 * (2 * k.radius + 1) + 1, 64)
        values = sample_functions(size.kernel_trials, (n,), seed)
        gap = domination_gap(k, values)
        scale = values.amax(-1, keepdim=True).clamp(min=1.0)
        worst = max(worst, float((gap / scale).max()))
        if bool((gap > RELATIVE_TOLERANCE * scale).any()):
            raise PropertyCheckError(
                'class-k-domination', f'|{k.label}| * f exceeds Mf'
            )
    heavy = gaussian(0.01, h).scaled(2.0)
    verdict = in_class_K(heavy, seed=seed)
    if verdict.status != REFUTED or verdict.witness is None:
        raise PropertyCheckError(
            'class-k-refutation', f'mass-2 gaussian is {verdict.status}'
        )
    return (
        f'worst relative gap {worst:.3g}; mass-2 gaussian refuted at cell '
        f'{verdict.violation_cell}'
    )


def lattice_maximal_bound(size: SuiteSize, seed: int) -> str:
    grid = Grid1D.symmetric(1.0, 32)
    space = MixedSpace.counting([3, 2], [2.0, 3.0])
    w = power_weight(0.5, grid)
    full = lattice_space(grid, space, 2.0, w)
    samples = sample_functions(2 * size.lattice_samples, (32, 3, 2), seed)
    upper = samples * (
        1.0 + torch.rand(samples.shape, generator=make_generator(seed), dtype=DTYPE)
    )
    smaller = mixed_norm(grid_maximal(samples), full)
    larger = mixed_norm(grid_maximal(upper), full)
    if bool((smaller > larger * (1.0 + RELATIVE_TOLERANCE)).any()):
        raise PropertyCheckError(
            'lattice-maximal-monotone', '|F| <= |G| but |MF| > |MG|'
        )
    ratios = smaller / mixed_norm(samples, full)
    first = float(ratios[: size.lattice_samples].max())
    doubled = float(ratios.max())
    if not math.isfinite(doubled):
        raise PropertyCheckError('lattice-maximal-finite', 'ratio is not finite')
    change = (doubled - first) / first
    if change >= STABILITY:
        raise PropertyCheckError(
            'lattice-maximal-stability',
            f'maximal ratio moved from {first} to {doubled}',
        )
    return f'max ratio {doubled:.6g}, change {change:.3g} on doubling'


def rdf_invariants(size: SuiteSize, seed: int) -> str:
    generator = make_generator(seed)
    grid = Grid1D.symmetric(1.0, 32)
    worst = 0.0
    for index in range(size.rdf_cases):
        p = (1.5, 2.0, 3.0)[index % 3]
        exponents = [a for a in POWER_EXPONENTS if a < p - 1.0]
        w = power_weight(exponents[index % len(exponents)], grid)
        u = GridFunction(
            grid, torch.rand(grid.n_cells, generator=generator, dtype=DTYPE)
        )
        result = rdf_iterate(u, p, w, K=16, seed=seed + index)
        relative_tail = result.tail_norm / float(weighted_lp_norm(result.ru, p, w))
        worst = max(worst, relative_tail)
        if relative_tail >= 1e-6:
            raise PropertyCheckError(
                'rdf-tail', f'case {index}: relative tail {relative_tail}'
            )
    return f'{size.rdf_cases} cases, worst relative tail {worst:.3g}'


def extrapolation_verdicts(size: SuiteSize, seed: int) -> str:
    grid = Grid1D.symmetric(1.0, size.extrapolation_cells)
    weights = power_weights(POWER_EXPONENTS, grid)
    spaces = [
        MixedSpace([], []),
        MixedSpace.counting([3], [2.0]),
        MixedSpace.counting([3, 2], [2.0, 3.0]),
    ]
    args = (MaximalPairs(), 2.0, [1.5, 3.0])
    reports = []
    for space in spaces:
        report = verify_mixed_extrapolation(
            *args, space, weights, seed, size.extrapolation_samples
        )
        if not report.passed:
            raise PropertyCheckError(
                'extrapolation-verdict', f'{space.n_axes} axes: {report.fits}'
            )
        reports.append(report)
    scalar = verify_extrapolation_pair(
        *args, weights, seed, size.extrapolation_samples
    )
    for (_, _, x, y), (_, _, x0, y0) in zip(reports[0].rows(), scalar.rows()):
        if _relative_gap(x, x0) > 1e-12 or _relative_gap(y, y0) > 1e-12:
            raise PropertyCheckError(
                'extrapolation-scalar', 'mixed verifier without axes differs'
            )
    favored = {p: fit.favored for p, fit in reports[0].fits.items()}
    return f'0, 1 and 2 axes pass; favored exponents {favored}'


def _structured_families(seed: int, count: int, structures):
    generator = make_generator(seed)
    for index in range(count):
        dim = 2 + index % 3
        space = MixedSpace.counting([dim], [2.0])
        structure = structures[index % len(structures)]
        yield random_structured_family(space, 2 + index % 2, structure, generator)


def ls_sandwich(size: SuiteSize, seed: int) -> str:
    worst_fraction = math.inf
    worst_adjoint = math.inf
    worst_gap = 0.0
    families = _structured_families(
        seed,
        size.structured_families,
        (MULTIPLICATION, WEIGHTED_COMPOSITION),
    )
    for index, family in enumerate(families):
        r_one = structured_ls_bound(family, 1.0, seed)
        r_inf = structured_ls_bound(family, math.inf, seed)
        for s in (1.5, 3.0):
            exact = structured_ls_bound(family, s, seed)
            estimate = estimate_ls_bound(
                family, s, seed=seed + index, options=size.search
            )
            lower = estimate.lower
            worst_fraction = min(worst_fraction, lower / exact)
            if lower < SEARCH_FRACTION * exact:
                raise PropertyCheckError(
                    'ls-search', f'family {index}, s={s}: {lower} < 0.9 * {exact}'
                )
            interpolated = interpolation_certificate(r_one, r_inf, 1.0, math.inf, s)
            duality = duality_certificate(family, s)
            for name, value in (
                ('interpolation', interpolated),
                ('duality', None if duality is None else duality.value),
            ):
                if value is not None and lower > value + SANDWICH_TOLERANCE:
                    raise PropertyCheckError(
                        f'ls-{name}-certificate',
                        f'family {index}, s={s}: lower {lower} exceeds {value}',
                    )
            transported = estimate_ls_bound(
                adjoint_family(family),
                conjugate(s),
                seed=seed + index,
                options=size.search,
            ).lower
            worst_adjoint = min(worst_adjoint, transported / exact)
            if transported > exact * (1.0 + RELATIVE_TOLERANCE) + SANDWICH_TOLERANCE:
                raise PropertyCheckError(
                    'ls-adjoint',
                    f'family {index}, s={s}: adjoint estimate {transported} '
                    f'exceeds R^s = {exact}',
                )
            if transported < SEARCH_FRACTION * exact:
                raise PropertyCheckError(
                    'ls-adjoint-search',
                    f'family {index}, s={s}: {transported} < 0.9 * {exact}',
                )
            gap = abs(transported - lower) / max(transported, lower)
            worst_gap = max(worst_gap, gap)
            if gap > ADJOINT_AGREEMENT:
                raise PropertyCheckError(
                    'ls-adjoint-agreement',
                    f'family {index}, s={s}: estimates {lower} and {transported} '
                    f'differ by {gap:.3g}',
                )
    return (
        f'lower/exact >= {worst_fraction:.4f}, adjoint lower/exact '
        f'>= {worst_adjoint:.4f}, adjoint gap <= {worst_gap:.4f}'
    )


def ls_shape(size: SuiteSize, seed: int) -> str:
    families = _structured_families(
        seed, size.shape_families, (WEIGHTED_COMPOSITION,)
    )
    q = 2.0
    for index, family in enumerate(families):
        values = [structured_ls_bound(family, s, seed) for s in SHAPE_GRID]
        for (s, a), (t, b) in zip(
            zip(SHAPE_GRID, values), zip(SHAPE_GRID[1:], values[1:])
        ):
            increasing = t <= q and b > a * (1.0 + SHAPE_TOLERANCE)
            decreasing = s >= q and a > b * (1.0 + SHAPE_TOLERANCE)
            if increasing or decreasing:
                raise PropertyCheckError(
                    'ls-shape',
                    f'family {index}: R^{s} = {a}, R^{t} = {b} around q={q}',
                )
    return f'{size.shape_families} families decrease up to q=2 and increase after'


def integral_time_grid(size: SuiteSize) -> Grid1D:
    return Grid1D.symmetric(1.0, size.time_cells)


def integral_kernels(h: float) -> List[Kernel]:
    return [
        gaussian(2.0 * h * h, h),
        box(2, h),
        one_sided_exponential(0.5 / h, h),
    ]


def integral_rademacher(size: SuiteSize, seed: int) -> str:
    time_grid = integral_time_grid(size)
    family = heat_evolution_family(
        time_grid, Grid1D(0.0, 1.0, size.space_cells), 2.0, scale=0.5
    )
    operators = [IntegralOperator(k, family) for k in integral_kernels(time_grid.h)]
    for op in operators:
        if not op.certified:
            raise PropertyCheckError('integral-kernels', f'{op.kernel.label}')
    samples = []
    worst_change = 0.0
    for v in power_weights(POWER_EXPONENTS[:3], time_grid):
        for op in operators:
            chain = uniform_bound_check(
                op, 2.0, v, size.chain_trials, seed, rescale=True
            )
            if not chain.passed:
                raise PropertyCheckError(chain.failed_item, op.label)
        lattice_family = integral_family(operators, 2.0, v)
        values = [
            rademacher_bound_estimate(
                lattice_family,
                restarts,
                size.search.n_max,
                seed,
                size.search,
            ).value
            for restarts in (size.rademacher_restarts, 2 * size.rademacher_restarts)
        ]
        if not all(math.isfinite(value) for value in values):
            raise PropertyCheckError('rademacher-finite', f'estimates {values}')
        change = abs(values[1] - values[0]) / values[0]
        worst_change = max(worst_change, change)
        if change > STABILITY:
            raise PropertyCheckError(
                'rademacher-stability', f'estimates {values} on doubling'
            )
        samples.append((ap_constant(v, 2.0).constant, values[1]))
    envelope = fit_consistency_profile(samples)
    return (
        f'change on doubling <= {worst_change:.3g}; raw envelope decrease '
        f'{envelope.max_decrease():.3g}'
    )


def integral_structured_sandwich(size: SuiteSize, seed: int) -> str:
    time_grid = integral_time_grid(size)
    experiment = TheoremExperiment(
        'structured-sandwich',
        time_grid,
        integral_kernels(time_grid.h),
        {'kind': 'multiplication', 'points': size.space_cells},
        p=2.0,
        q=2.0,
        s=[1.25, 2.0],
        weights=PowerWeightFamily(list(POWER_EXPONENTS[:3])),
        options=size.search,
        seed=seed,
        rademacher=False,
        chain_trials=size.chain_trials,
    )
    if not experiment.run():
        raise PropertyCheckError('chain', 'integral operator chain failed')
    bounds = experiment.results['bounds']
    slack = min(
        (upper - lower for _, _, lower, upper, _ in bounds if math.isfinite(upper)),
        default=math.nan,
    )
    return f'{len(bounds)} bounds within the certificate, least slack {slack:.3g}'


def norming_duality(size: SuiteSize, seed: int) -> str:
    generator = make_generator(seed)
    shapes = [(4,), (4, 3), (4, 3, 2)]
    worst = 0.0
    for index in range(size.norming_samples):
        shape = shapes[index % len(shapes)]
        exponents = 1.25 + 6.75 * torch.rand(
            len(shape), generator=generator, dtype=DTYPE
        ).clamp(1e-6, 1.0 - 1e-6)
        space = MixedSpace.counting(list(shape), exponents.tolist())
        g = torch.randn(shape, generator=generator, dtype=DTYPE)
        witness = norming_function(g, space)
        gap = _relative_gap(witness.pairing, witness.norm * witness.dual_norm)
        worst = max(worst, gap)
        if gap > HOLDER_TOLERANCE:
            raise PropertyCheckError('norming-holder', f'sample {index}: gap {gap}')
    space = MixedSpace.counting([4, 3], [2.0, 3.0])
    for N, r in ((3, 1.5), (4, 4.0)):
        report = tuple_duality_constants(space, N, r, size.tuple_trials, seed)
        if not report.chains_ok:
            raise PropertyCheckError(
                'tuple-chains', f'N={N}, r={r}: slack {report.worst_slack}'
            )
    return f'worst Holder gap {worst:.3g}; tuple chains hold'


def _summary_run(size: SuiteSize, seed: int, threads: int, file_name: str) -> None:
    previous = os.environ.get(THREADS_VARIABLE)
    os.environ[THREADS_VARIABLE] = str(threads)
    try:
        configure_threads()
        names = [name for name, _ in CRITERIA if name != 'determinism']
        rows = run_criteria(size, seed, names)
    finally:
        if previous is None:
            del os.environ[THREADS_VARIABLE]
        else:
            os.environ[THREADS_VARIABLE] = previous
    write_csv(file_name, SUITE_HEADER, rows, {'seed': seed, 'criteria': len(rows)})


def determinism(size: SuiteSize, seed: int) -> str:
    """Run every other criterion with 1 and then 4 threads and compare the
    summary bytes."""
    threads = torch.get_num_threads()
    try:
        with tempfile.TemporaryDirectory() as directory:
            summaries = []
            for n in (1, 4):
                summaries.append(os.path.join(directory, f'summary-{n}.csv'))
                _summary_run(size, seed, n, summaries[-1])
            if not filecmp.cmp(summaries[0], summaries[1], shallow=False):
                raise PropertyCheckError(
                    'determinism', 'summaries with 1 and 4 threads differ'
                )
    finally:
        torch.set_num_threads(threads)
    return 'summary byte-identical with 1 and 4 threads'


CRITERIA: List[Tuple[str, Callable[[SuiteSize, int], str]]] = [
    ('ap-duality', ap_duality),
    ('ap-monotonicity', ap_monotonicity),
    ('maximal-oracle', maximal_oracle),
    ('class-k-soundness', class_k_soundness),
    ('lattice-maximal', lattice_maximal_bound),
    ('rdf-invariants', rdf_invariants),
    ('extrapolation', extrapolation_verdicts),
    ('ls-sandwich', ls_sandwich),
    ('ls-shape', ls_shape),
    ('integral-rademacher', integral_rademacher),
    ('integral-structured-sandwich', integral_structured_sandwich),
    ('norming-duality', norming_duality),
    ('determinism', determinism),
]


def run_criteria(size: SuiteSize, seed: int, names=None) -> List[list]:
    """Run the criteria (all of them when ``names`` is None) and return the
    ``criterion,status,detail`` rows."""
    rows = []
    for name, criterion in CRITERIA:
        if names is not None and name not in names:
            continue
        start = time.perf_counter()
        try:
            rows.append([name, PASS, criterion(size, seed)])
        except PropertyCheckError as e:
            rows.append([name, FAIL, str(e)])
        except DomainError as e:
            rows.append([name, ERROR, str(e)])
        logger.info(
            '%s: %s (%.1fs)', name, rows[-1][1], time.perf_counter() - start
        )
    return rows


def create_suite_parser(subparsers):
    parser = subparsers.add_parser('suite', help='run the acceptance battery')
    parser.add_argument(
        '--size',
        choices=sorted(SIZES),
        default='small',
        help="""sample sizes (default: small)""",
    )
    parser.add_argument('--seed', type=int, default=0, help="""seed (default: 0)""")
    parser.add_argument(
        '--only',
        action='append',
        choices=[name for name, _ in CRITERIA],
        help="""run only this criterion (repeatable)""",
    )
    parser.add_argument('--out', help="""summary CSV file (default: stdout)""")
    parser.set_defaults(func=run_suite)
    return parser


def run_suite(arg) -> int:
    rows = run_criteria(SIZES[arg.size], arg.seed, arg.only)
    write_csv(
        arg.out,
        SUITE_HEADER,
        rows,
        {'size': arg.size, 'seed': arg.seed, 'criteria': len(rows)},
    )
    failed = [row for row in rows if row[1] != PASS]
    if failed:
        for name, status, detail in failed:
            logging.error('%s %s: %s', name, status, detail)
        raise PropertyCheckError(failed[0][0], f'{len(failed)} criteria failed')
    return 0
