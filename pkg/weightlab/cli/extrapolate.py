from __future__ import annotations

from ..core.utils import PropertyCheckError
from ..extrapolate.pairs import PAIR_GENERATORS, pair_generator
from ..extrapolate.verify import verify_mixed_extrapolation
from ..lattice.domain import Grid1D
from ..weights.generators import parse_weight_spec, power_weights
from .argparse_utils import exponent, list_of_exponents, list_of_ints, positive_int
from .utils import mixed_space, parameter_map


def create_extrapolate_parser(subparsers):
    parser = subparsers.add_parser(
        'extrapolate', help='verify extrapolation of weighted norm inequalities'
    )
    parser.add_argument(
        '--p0', type=exponent, required=True, help="""hypothesis exponent"""
    )
    parser.add_argument(
        '--p',
        type=list_of_exponents,
        required=True,
        help="""comma-separated conclusion exponents""",
    )
    parser.add_argument(
        '--weights',
        default='power:0,0.3,0.6,0.9',
        help="""weight family, e.g. power:0,0.3,0.6 (default: power:0,0.3,0.6,0.9)""",
    )
    parser.add_argument(
        '--pairs',
        choices=sorted(PAIR_GENERATORS),
        default='maximal',
        help="""pair generator (default: maximal)""",
    )
    parser.add_argument(
        '--cells',
        type=positive_int,
        default=64,
        help="""cells of the grid on [-1, 1] (default: 64)""",
    )
    parser.add_argument(
        '--axes', type=list_of_ints, help="""lattice axis sizes, e.g. 3,2"""
    )
    parser.add_argument(
        '--q', type=list_of_exponents, help="""lattice exponents (default: 2)"""
    )
    parser.add_argument(
        '--samples',
        type=positive_int,
        default=64,
        help="""number of sampled functions (default: 64)""",
    )
    parser.add_argument('--seed', type=int, default=0, help="""seed (default: 0)""")
    parser.add_argument('--out', help="""output CSV file (default: stdout)""")
    parser.set_defaults(func=run_extrapolate)
    return parser


def run_extrapolate(arg) -> int:
    grid = Grid1D.symmetric(1.0, arg.cells)
    weights = power_weights(parse_weight_spec(arg.weights), grid)
    report = verify_mixed_extrapolation(
        pair_generator(arg.pairs),
        arg.p0,
        arg.p,
        mixed_space(arg.axes, arg.q),
        weights,
        arg.seed,
        arg.samples,
    )
    report.write(arg.out, parameter_map(arg))
    if not report.passed:
        raise PropertyCheckError(
            'extrapolation-verdict',
            f'extrapolation from p0={arg.p0} to {arg.p} is not supported by the '
            f'samples ({report.header})',
        )
    return 0
