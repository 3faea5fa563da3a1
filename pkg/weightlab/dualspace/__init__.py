from .norming import (
    DualityReport,
    NormingWitness,
    TupleDualityReport,
    norming_function,
    pairing,
    tuple_duality_constants,
    tuple_space,
    verify_duality_pairing,
)

__all__ = [
    'DualityReport',
    'NormingWitness',
    'TupleDualityReport',
    'norming_function',
    'pairing',
    'tuple_duality_constants',
    'tuple_space',
    'verify_duality_pairing',
]
