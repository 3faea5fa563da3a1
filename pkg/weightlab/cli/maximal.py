from __future__ import annotations

from ..core.utils import DomainError
from ..lattice.io import (
    read_grid_function,
    read_lattice_function,
    write_grid_function,
    write_lattice_function,
)
from ..lattice.norms import lattice_norm
from ..maximal.estimate import maximal_norm_lower
from ..maximal.maximal import lattice_maximal, maximal_function
from ..weights.muckenhoupt import Weight
from .argparse_utils import exponent, list_of_exponents, list_of_ints, positive_int
from .utils import mixed_space, parameter_map


def create_maximal_parser(subparsers):
    parser = subparsers.add_parser(
        'maximal', help='emit the maximal function of a grid or lattice function'
    )
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument('--f', help="""CSV file with columns cell,value""")
    source.add_argument(
        '--fiber-csv',
        help="""CSV file with a cell column and one column per atom""",
    )
    parser.add_argument(
        '--axes',
        type=list_of_ints,
        help="""sizes of the lattice axes of --fiber-csv, e.g. 4,3""",
    )
    parser.add_argument(
        '--q',
        type=list_of_exponents,
        help="""exponents of the lattice axes (default: 2)""",
    )
    parser.add_argument(
        '--weight',
        help="""weight CSV; logs a lower bound of the norm of M on L^p(w)""",
    )
    parser.add_argument(
        '--p', type=exponent, default=2.0, help="""exponent of L^p(w)"""
    )
    parser.add_argument(
        '--trials',
        type=positive_int,
        default=100,
        help="""random draws of the norm search (default: 100)""",
    )
    parser.add_argument('--seed', type=int, default=0, help="""seed (default: 0)""")
    parser.add_argument('--out', help="""output CSV file (default: stdout)""")
    parser.set_defaults(func=run_maximal)
    return parser


def run_maximal(arg) -> int:
    metadata = parameter_map(arg)
    if arg.f is not None:
        f = read_grid_function(arg.f)
        Mf = maximal_function(f)
        if arg.weight is not None:
            w = read_grid_function(arg.weight, f.grid)
            estimate = maximal_norm_lower(
                arg.p, Weight(w.grid, w.values), arg.trials, arg.seed
            )
            metadata['norm_lower_bound'] = estimate.lower_bound
        write_grid_function(Mf, arg.out, metadata)
        return 0
    if arg.axes is None:
        raise DomainError('--fiber-csv needs --axes')
    space = mixed_space(arg.axes, arg.q)
    F = read_lattice_function(arg.fiber_csv, space)
    MF = lattice_maximal(F)
    if arg.weight is not None:
        w = read_grid_function(arg.weight, F.grid)
        w = Weight(w.grid, w.values)
        denominator = float(lattice_norm(F, arg.p, w))
        if denominator > 0:
            metadata['ratio'] = float(lattice_norm(MF, arg.p, w)) / denominator
    write_lattice_function(MF, arg.out, metadata)
    return 0
