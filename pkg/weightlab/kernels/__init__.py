from .catalog import (
    CATALOG,
    box,
    catalog,
    exponential,
    gaussian,
    one_sided_exponential,
)
from .kernel import Kernel, convolve, convolve_values, read_kernel, write_kernel
from .membership import (
    MembershipVerdict,
    domination_gap,
    in_class_K,
    least_decreasing_majorant,
    least_unimodal_majorant,
)

__all__ = [
    'CATALOG',
    'Kernel',
    'MembershipVerdict',
    'box',
    'catalog',
    'convolve',
    'convolve_values',
    'domination_gap',
    'exponential',
    'gaussian',
    'in_class_K',
    'least_decreasing_majorant',
    'least_unimodal_majorant',
    'one_sided_exponential',
    'read_kernel',
    'write_kernel',
]
