from .estimate import MaximalNormEstimate, maximal_norm_lower, maximal_ratio
from .maximal import (
    lattice_maximal,
    maximal_function,
    maximal_reference,
    maximal_values,
    maximizing_interval,
)

__all__ = [
    'MaximalNormEstimate',
    'lattice_maximal',
    'maximal_function',
    'maximal_norm_lower',
    'maximal_ratio',
    'maximal_reference',
    'maximal_values',
    'maximizing_interval',
]
