from .evolution import (
    EvolutionFamily,
    extend_evolution_family,
    extend_restrict,
    heat_evolution_family,
    identity_evolution_family,
    multiplication_evolution_family,
    periodic_laplacian,
    random_multiplication_family,
)
from .experiment import TheoremExperiment, structured_certificates
from .integral import (
    ChainReport,
    IntegralOperator,
    adjoint_integral_operator,
    apply_integral_operator,
    integral_family,
    uniform_bound_check,
)

__all__ = [
    'ChainReport',
    'EvolutionFamily',
    'IntegralOperator',
    'TheoremExperiment',
    'adjoint_integral_operator',
    'apply_integral_operator',
    'extend_evolution_family',
    'extend_restrict',
    'heat_evolution_family',
    'identity_evolution_family',
    'integral_family',
    'multiplication_evolution_family',
    'periodic_laplacian',
    'random_multiplication_family',
    'structured_certificates',
    'uniform_bound_check',
]
