from .domination import (
    DominationVerdict,
    domination_constant,
    dominating_weight_structured,
    verify_domination,
)
from .pairs import (
    IdentityPairs,
    MaximalPairs,
    PairGenerator,
    ReversedPairs,
    pair_generator,
    sample_functions,
)
from .rdf import RdFResult, maximal_norm_upper, rdf_iterate
from .verify import (
    ExponentFit,
    ExtrapolationReport,
    fit_exponents,
    verify_extrapolation_pair,
    verify_mixed_extrapolation,
)

__all__ = [
    'DominationVerdict',
    'ExponentFit',
    'ExtrapolationReport',
    'IdentityPairs',
    'MaximalPairs',
    'PairGenerator',
    'RdFResult',
    'ReversedPairs',
    'dominating_weight_structured',
    'domination_constant',
    'fit_exponents',
    'maximal_norm_upper',
    'pair_generator',
    'rdf_iterate',
    'sample_functions',
    'verify_domination',
    'verify_extrapolation_pair',
    'verify_mixed_extrapolation',
]
