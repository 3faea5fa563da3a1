from .consistency import ConsistencyProfile, fit_consistency_profile
from .generators import (
    PowerWeightFamily,
    parse_weight_spec,
    power_weight,
    power_weights,
    random_weight,
)
from .muckenhoupt import (
    ApReport,
    OpennessReport,
    Weight,
    a1_constant,
    ap_constant,
    dual_weight,
    openness_exponent,
    openness_profile,
)

__all__ = [
    'ApReport',
    'ConsistencyProfile',
    'OpennessReport',
    'PowerWeightFamily',
    'Weight',
    'a1_constant',
    'ap_constant',
    'dual_weight',
    'fit_consistency_profile',
    'openness_exponent',
    'openness_profile',
    'parse_weight_spec',
    'power_weight',
    'power_weights',
    'random_weight',
]
