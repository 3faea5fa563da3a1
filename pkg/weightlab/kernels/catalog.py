"""Named kernels, normalized to a prescribed discrete mass."""

from __future__ import annotations

import math
from typing import Any, Callable, Dict, Mapping

import torch

from ..core.utils import DTYPE, DomainError
from .kernel import Kernel

# relative height at which exponential tails are cut
TAIL_CUTOFF = 1e-12


def _check_mass(mass: float) -> None:
    if not 0.0 <= mass <= 1.0:
        raise DomainError(f'kernel mass must lie in [0, 1], got {mass}')


def _normalized(values: torch.Tensor, h: float, mass: float, label: str) -> Kernel:
    _check_mass(mass)
    return Kernel(values * (mass / (h * float(values.sum()))), h, label)


def _offsets(radius: int) -> torch.Tensor:
    return torch.arange(-radius, radius + 1, dtype=DTYPE)


def gaussian(t: float, h: float, mass: float = 1.0) -> Kernel:
    r"""Discrete heat kernel :math:`e^{-x^2/(4t)}` cut at six standard
    deviations; ``t = 0`` gives the identity kernel."""
    if t < 0:
        raise DomainError(f'gaussian time must be >= 0, got {t}')
    radius = math.ceil(6.0 * math.sqrt(2.0 * t) / h)
    x = h * _offsets(radius)
    values = torch.exp(-(x**2) / (4.0 * t)) if t > 0 else torch.ones(1, dtype=DTYPE)
    return _normalized(values, h, mass, f'gaussian(t={t})')


def box(m: int, h: float, mass: float = 1.0) -> Kernel:
    """Constant kernel on the offsets :math:`-m..m`."""
    if int(m) != m or m < 0:
        raise DomainError(f'box half-width must be a nonnegative integer, got {m}')
    return _normalized(torch.ones(2 * int(m) + 1, dtype=DTYPE), h, mass, f'box(m={m})')


def _tail_radius(lam: float, h: float) -> int:
    if not lam > 0:
        raise DomainError(f'decay rate must be positive, got {lam}')
    return max(1, math.ceil(-math.log(TAIL_CUTOFF) / (lam * h)))


def exponential(lam: float, h: float, mass: float = 1.0) -> Kernel:
    r"""Two-sided kernel :math:`e^{-\lambda|x|}`."""
    radius = _tail_radius(lam, h)
    values = torch.exp(-lam * h * _offsets(radius).abs())
    return _normalized(values, h, mass, f'exponential(lambda={lam})')


def one_sided_exponential(
    lam: float, h: float, mass: float = 1.0, normalization: str = 'majorant'
) -> Kernel:
    r"""Causal kernel :math:`e^{-\lambda x}\chi_{x \ge 0}`.

    With ``normalization='majorant'`` the even decreasing majorant has mass
    ``mass`` (so the kernel itself carries about half of it); with
    ``'total'`` the kernel itself has mass ``mass``.
    """
    radius = _tail_radius(lam, h)
    offsets = _offsets(radius)
    values = torch.where(
        offsets >= 0, torch.exp(-lam * h * offsets), torch.zeros_like(offsets)
    )
    label = f'one_sided_exponential(lambda={lam})'
    if normalization == 'total':
        return _normalized(values, h, mass, label)
    if normalization != 'majorant':
        raise DomainError(f'unknown normalization `{normalization}\'')
    right = values[radius:]
    majorant_sum = 2.0 * float(right.sum()) - float(right[0])
    _check_mass(mass)
    return Kernel(values * (mass / (h * majorant_sum)), h, label)


CATALOG: Dict[str, Callable[..., Kernel]] = {
    'gaussian': lambda p, h: gaussian(p['t'], h, p.get('mass', 1.0)),
    'box': lambda p, h: box(p['m'], h, p.get('mass', 1.0)),
    'exponential': lambda p, h: exponential(p['lambda'], h, p.get('mass', 1.0)),
    'one_sided_exponential': lambda p, h: one_sided_exponential(
        p['lambda'], h, p.get('mass', 1.0), p.get('normalization', 'majorant')
    ),
}


def catalog(name: str, params: Mapping[str, Any], h: float) -> Kernel:
    """Build the kernel ``name`` with parameters ``params`` for cell width
    ``h``.

    :example:
    >>> k = catalog('box', {'m': 1}, 0.5)
    >>> k.radius, round(k.l1, 12)
    (1, 1.0)
    """
    if name not in CATALOG:
        raise DomainError(
            f'unknown kernel `{name}\' (expected one of {", ".join(sorted(CATALOG))})'
        )
    try:
        return CATALOG[name](dict(params), float(h))
    except KeyError as e:
        raise DomainError(f'kernel `{name}\' needs parameter `{e.args[0]}\'') from None
