from .certificates import (
    automatic_certificates,
    duality_certificate,
    interpolation_certificate,
)
from .family import (
    GENERIC,
    MULTIPLICATION,
    STRUCTURES,
    WEIGHTED_COMPOSITION,
    OperatorFamily,
    adjoint_family,
    ls_ratio,
    operator_norm_bound,
    read_family,
    uniform_norm,
    write_family,
)
from .rademacher import RademacherEstimate, rademacher_bound_estimate
from .search import (
    LsBoundEstimate,
    SearchOptions,
    TupleWitness,
    UpperCertificate,
    estimate_ls_bound,
    search_tuples,
)
from .structured import (
    StructuredExtremal,
    domination_operators,
    exact_ls_bound_structured,
    random_structured_family,
    structured_extremal,
    structured_ls_bound,
)

__all__ = [
    'GENERIC',
    'LsBoundEstimate',
    'MULTIPLICATION',
    'OperatorFamily',
    'RademacherEstimate',
    'STRUCTURES',
    'SearchOptions',
    'StructuredExtremal',
    'TupleWitness',
    'UpperCertificate',
    'WEIGHTED_COMPOSITION',
    'adjoint_family',
    'automatic_certificates',
    'domination_operators',
    'duality_certificate',
    'estimate_ls_bound',
    'exact_ls_bound_structured',
    'interpolation_certificate',
    'ls_ratio',
    'operator_norm_bound',
    'rademacher_bound_estimate',
    'random_structured_family',
    'read_family',
    'search_tuples',
    'structured_extremal',
    'structured_ls_bound',
    'uniform_norm',
    'write_family',
]
