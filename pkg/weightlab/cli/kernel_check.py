from __future__ import annotations

import logging

from ..core.logger import write_csv
from ..core.utils import DomainError
from ..kernels.catalog import CATALOG, catalog
from ..kernels.kernel import read_kernel, write_kernel
from ..kernels.membership import in_class_K
from .argparse_utils import positive_int
from .utils import parameter_map

logger = logging.getLogger(__name__)

VERDICT_HEADER = [
    'kernel',
    'status',
    'route',
    'certificate_mass',
    'l1',
    'violation_cell',
    'violation',
]


def create_kernel_check_parser(subparsers):
    parser = subparsers.add_parser(
        'kernel-check', help='decide membership of a kernel in the class K'
    )
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument(
        '--name', choices=sorted(CATALOG), help="""catalog kernel"""
    )
    source.add_argument(
        '--kernel-csv', help="""CSV file with columns offset,value"""
    )
    parser.add_argument('--t', type=float, help="""time of the gaussian kernel""")
    parser.add_argument('--m', type=int, help="""half-width of the box kernel""")
    parser.add_argument(
        '--lambda',
        dest='lam',
        type=float,
        help="""decay rate of the exponential kernels""",
    )
    parser.add_argument(
        '--mass', type=float, default=1.0, help="""discrete mass (default: 1)"""
    )
    parser.add_argument(
        '--n',
        type=positive_int,
        default=256,
        help="""cells per unit length; the cell width is 1/n (default: 256)""",
    )
    parser.add_argument('--h', type=float, help="""cell width (overrides --n)""")
    parser.add_argument(
        '--trials',
        type=positive_int,
        default=1000,
        help="""random inputs of the refutation (default: 1000)""",
    )
    parser.add_argument('--seed', type=int, default=0, help="""seed (default: 0)""")
    parser.add_argument('--kernel-out', help="""write the kernel as CSV""")
    parser.add_argument('--out', help="""output CSV file (default: stdout)""")
    parser.set_defaults(func=run_kernel_check)
    return parser


def kernel_parameters(arg) -> dict:
    params = {'mass': min(arg.mass, 1.0)}
    for key, value in (('t', arg.t), ('m', arg.m), ('lambda', arg.lam)):
        if value is not None:
            params[key] = value
    return params


def run_kernel_check(arg) -> int:
    h = arg.h if arg.h is not None else 1.0 / arg.n
    if not h > 0:
        raise DomainError(f'cell width must be positive, got {h}')
    if arg.name is not None:
        k = catalog(arg.name, kernel_parameters(arg), h)
        if arg.mass > 1.0:
            # catalog kernels stop at mass 1
            k = k.scaled(arg.mass)
            k.label = f'{k.label}*{arg.mass!r}'
    else:
        k = read_kernel(arg.kernel_csv, h)
    verdict = in_class_K(k, arg.trials, arg.seed)
    logger.info('%s: %s', k.label, verdict.status)
    if arg.kernel_out is not None:
        write_kernel(k, arg.kernel_out)
    write_csv(
        arg.out,
        VERDICT_HEADER,
        [
            [
                k.label,
                verdict.status,
                verdict.route or '',
                '' if verdict.certificate_mass is None else verdict.certificate_mass,
                k.l1,
                '' if verdict.violation_cell is None else verdict.violation_cell,
                '' if verdict.violation is None else verdict.violation,
            ]
        ],
        parameter_map(arg),
    )
    return 0
