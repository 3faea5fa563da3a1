from __future__ import annotations

import math

import torch

from ..core.logger import write_csv
from ..core.utils import DTYPE, PropertyCheckError, make_generator
from ..dualspace.norming import (
    HOLDER_TOLERANCE,
    tuple_duality_constants,
    verify_duality_pairing,
)
from .argparse_utils import exponent, list_of_exponents, list_of_ints, positive_int
from .utils import mixed_space, parameter_map

DUALITY_HEADER = ['quantity', 'value']


def create_duality_parser(subparsers):
    parser = subparsers.add_parser(
        'duality', help='check Holder duality of a mixed-norm space'
    )
    parser.add_argument(
        '--axes', type=list_of_ints, required=True, help="""axis sizes, e.g. 4,3"""
    )
    parser.add_argument(
        '--q',
        type=list_of_exponents,
        required=True,
        help="""exponents in (1, inf), one per axis""",
    )
    parser.add_argument(
        '--trials',
        type=positive_int,
        default=1000,
        help="""random functions of the sampled supremum (default: 1000)""",
    )
    parser.add_argument(
        '--N', type=positive_int, help="""also check tuples of this length"""
    )
    parser.add_argument(
        '--r', type=exponent, default=2.0, help="""tuple exponent (default: 2)"""
    )
    parser.add_argument('--seed', type=int, default=0, help="""seed (default: 0)""")
    parser.add_argument('--out', help="""output CSV file (default: stdout)""")
    parser.set_defaults(func=run_duality)
    return parser


def run_duality(arg) -> int:
    space = mixed_space(arg.axes, arg.q)
    g = torch.randn(space.shape, generator=make_generator(arg.seed), dtype=DTYPE)
    report = verify_duality_pairing(g, space, arg.trials, arg.seed + 1)
    witness_gap = abs(report.witness_value - report.dual_norm) / report.dual_norm
    rows = [
        ['dual_norm', report.dual_norm],
        ['sampled_max', report.sampled_max],
        ['witness_value', report.witness_value],
        ['sampled_gap', report.gap],
        ['witness_gap', witness_gap],
    ]
    tuples = None
    if arg.N is not None:
        tuples = tuple_duality_constants(space, arg.N, arg.r, arg.trials, arg.seed)
        rows += [
            ['tuple_worst_slack', tuples.worst_slack],
            ['tuple_identical_l1_lr', tuples.identical[0]],
            ['tuple_identical_lr_linf', tuples.identical[1]],
        ]
        if tuples.disjoint is not None:
            rows += [
                ['tuple_disjoint_l1_lr', tuples.disjoint[0]],
                ['tuple_disjoint_lr_linf', tuples.disjoint[1]],
            ]
        if tuples.dual_witness_gap is not None:
            rows.append(['tuple_dual_witness_gap', tuples.dual_witness_gap])
    write_csv(arg.out, DUALITY_HEADER, rows, parameter_map(arg))
    if not report.holder_ok:
        raise PropertyCheckError(
            'holder',
            f'sampled pairing {report.sampled_max} exceeds the dual norm '
            f'{report.dual_norm}',
        )
    if math.isnan(witness_gap) or witness_gap > HOLDER_TOLERANCE:
        raise PropertyCheckError('norming-witness', f'relative gap {witness_gap}')
    if tuples is not None and not tuples.chains_ok:
        raise PropertyCheckError(
            'tuple-chains', f'worst relative slack {tuples.worst_slack}'
        )
    return 0
