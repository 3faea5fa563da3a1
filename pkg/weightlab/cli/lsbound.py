from __future__ import annotations

import math

from ..core.logger import write_csv
from ..sbound.certificates import duality_certificate
from ..sbound.family import GENERIC, STRUCTURES, read_family
from ..sbound.search import SearchOptions, estimate_ls_bound
from .argparse_utils import list_of_exponents, list_of_ints, positive_int
from .plot import emit_plot
from .utils import mixed_space, parameter_map

BOUNDS_HEADER = ['s', 'lower', 'upper', 'certificate_kind']

WITNESS_HEADER = ['s', 'entry', 'member', 'atom', 'value']


def create_lsbound_parser(subparsers):
    parser = subparsers.add_parser(
        'lsbound', help='estimate ell^s-bounds of a family of matrices'
    )
    parser.add_argument(
        '--family',
        required=True,
        help="""CSV file with columns member,row,col,value""",
    )
    parser.add_argument(
        '--axes',
        type=list_of_ints,
        required=True,
        help="""axis sizes of the space the members act on, e.g. 4 or 2,2""",
    )
    parser.add_argument(
        '--q',
        type=list_of_exponents,
        help="""exponents of the axes (default: 2)""",
    )
    parser.add_argument(
        '--structure',
        choices=STRUCTURES,
        default=GENERIC,
        help="""structure of the members (default: generic)""",
    )
    parser.add_argument(
        '--s',
        type=list_of_exponents,
        required=True,
        help="""comma-separated exponents s, e.g. 1.5,2,inf""",
    )
    parser.add_argument(
        '--n-max', type=positive_int, help="""largest tuple length"""
    )
    parser.add_argument(
        '--budget', type=positive_int, help="""number of search restarts"""
    )
    parser.add_argument('--seed', type=int, default=0, help="""seed (default: 0)""")
    parser.add_argument('--out', help="""output CSV file (default: stdout)""")
    parser.add_argument('--witness', help="""CSV file receiving the witnesses""")
    parser.add_argument('--plot', help="""SVG file with s against the lower bound""")
    parser.set_defaults(func=run_lsbound)
    return parser


def run_lsbound(arg) -> int:
    space = mixed_space(arg.axes, arg.q)
    family = read_family(arg.family, space, structure=arg.structure)
    options = SearchOptions().with_budget(arg.n_max, arg.budget)
    rows, witnesses = [], []
    for s in arg.s:
        extra = duality_certificate(family, s)
        estimate = estimate_ls_bound(
            family,
            s,
            seed=arg.seed,
            options=options,
            certificates=[] if extra is None else [extra],
        )
        certificate = estimate.upper_certificate
        rows.append(
            [
                s,
                estimate.lower,
                math.nan if certificate is None else certificate.value,
                'none' if certificate is None else certificate.provenance,
            ]
        )
        flat = estimate.witness.xs.reshape(estimate.witness.size, -1)
        for entry, member in enumerate(estimate.witness.assignment):
            for atom, value in enumerate(flat[entry].tolist()):
                witnesses.append([s, entry, member, atom, value])
    metadata = parameter_map(arg)
    write_csv(arg.out, BOUNDS_HEADER, rows, metadata)
    if arg.witness is not None:
        write_csv(arg.witness, WITNESS_HEADER, witnesses, metadata)
    if arg.plot is not None:
        points = [(s, lower) for s, lower, _, _ in rows if not math.isinf(s)]
        emit_plot(points, arg.plot)
    return 0
