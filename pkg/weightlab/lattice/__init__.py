from .domain import Grid1D, MeasuredAxis, MixedSpace, parse_exponent
from .functions import GridFunction, LatticeFunction
from .norms import (
    fiber_norms,
    lattice_norm,
    lattice_space,
    mixed_norm,
    tuple_norm,
    weighted_lp_norm,
)

__all__ = [
    'Grid1D',
    'GridFunction',
    'LatticeFunction',
    'MeasuredAxis',
    'MixedSpace',
    'fiber_norms',
    'lattice_norm',
    'lattice_space',
    'mixed_norm',
    'parse_exponent',
    'tuple_norm',
    'weighted_lp_norm',
]
