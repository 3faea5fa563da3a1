from __future__ import annotations

import logging

from ..core.logger import write_csv
from ..lattice.io import read_grid_function
from ..weights.muckenhoupt import (
    Weight,
    a1_constant,
    ap_constant,
    dual_weight,
    openness_profile,
)
from .argparse_utils import exponent
from .utils import parameter_map

logger = logging.getLogger(__name__)


def create_ap_parser(subparsers):
    parser = subparsers.add_parser(
        'ap', help='compute the A_p constant of a weight given as cell,value CSV'
    )
    parser.add_argument(
        '--weight', required=True, help="""CSV file with columns cell,value"""
    )
    parser.add_argument(
        '--p',
        type=exponent,
        required=True,
        help="""exponent p >= 1 (p = 1 gives the A_1 constant)""",
    )
    parser.add_argument(
        '--dual',
        action='store_true',
        help="""also report the A_p' constant of the dual weight""",
    )
    parser.add_argument(
        '--openness',
        type=float,
        metavar='BUDGET',
        help="""largest sigma with [w]_{A_{p/sigma}} <= BUDGET""",
    )
    parser.add_argument('--out', help="""output CSV file (default: stdout)""")
    parser.set_defaults(func=run_ap)
    return parser


def run_ap(arg) -> int:
    w = read_grid_function(arg.weight)
    w = Weight(w.grid, w.values)
    if arg.p == 1.0:
        report = a1_constant(w)
    else:
        report = ap_constant(w, arg.p)
    rows = [['weight', report.p, report.constant, *report.witness_interval]]
    if arg.dual and arg.p > 1.0:
        sigma = dual_weight(w, arg.p)
        dual = ap_constant(sigma, report.p / (report.p - 1.0))
        rows.append(['dual', dual.p, dual.constant, *dual.witness_interval])
    metadata = parameter_map(arg)
    if arg.openness is not None:
        profile = openness_profile(w, arg.p, arg.openness)
        metadata['sigma'] = profile.sigma
        metadata['sigma_constant'] = profile.constant
    logger.info(
        '[w]_A%s = %s on %s', report.p, report.constant, report.witness_interval
    )
    write_csv(arg.out, ['weight', 'p', 'constant', 'first', 'last'], rows, metadata)
    return 0
