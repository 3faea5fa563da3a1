r"""Numerical lab for Muckenhoupt weights, maximal operators and
:math:`\ell^s`-bounds of operator families on mixed-norm lattices."""
from ._version import __version__
from .kernels import Kernel, in_class_K
from .lattice import Grid1D, GridFunction, LatticeFunction, MixedSpace
from .weights import Weight, ap_constant

__all__ = [
    'Grid1D',
    'GridFunction',
    'Kernel',
    'LatticeFunction',
    'MixedSpace',
    'Weight',
    'ap_constant',
    'in_class_K',
]
