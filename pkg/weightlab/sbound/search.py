r"""Extremal tuple search for :math:`\ell^s`- and Rademacher bounds.

The engine maximizes a scale-invariant ratio over a member assignment and an
input tuple. For a fixed assignment the inputs follow a normalized gradient
ascent with step halving; every few iterations each tuple entry may switch to
the member that improves the ratio most. Restarts cycle the tuple length
through :math:`1, \dots, N_{max}` and draw from one seeded generator, so
results depend only on the seed.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Callable, List, Optional, Sequence, Tuple

import torch
from torch import Tensor

from ..core.serializable import JSONSerializable
from ..core.utils import (
    DTYPE,
    SANDWICH_TOLERANCE,
    DomainError,
    PropertyCheckError,
    check_exponent,
    make_generator,
    register_class,
    validate,
)
from .family import OperatorFamily, ls_ratio_tensor

logger = logging.getLogger(__name__)

Objective = Callable[[List[int], Tensor], Tensor]


@register_class
@dataclass(frozen=True)
class SearchOptions(JSONSerializable):
    """Knobs of the tuple search."""

    n_max: int = 6
    restarts: int = 32
    iterations: int = 200
    step: float = 0.1
    min_step: float = 1e-6
    reassign_every: int = 10

    def __post_init__(self) -> None:
        if self.n_max < 1 or self.restarts < 1 or self.iterations < 0:
            raise DomainError('n_max and restarts must be >= 1, iterations >= 0')
        if not self.step > 0 or not self.min_step > 0:
            raise DomainError('step sizes must be positive')
        if self.reassign_every < 1:
            raise DomainError('reassign_every must be >= 1')

    def with_budget(self, n_max: Optional[int] = None, restarts: Optional[int] = None):
        changes = {}
        if n_max is not None:
            changes['n_max'] = n_max
        if restarts is not None:
            changes['restarts'] = restarts
        return replace(self, **changes)

    @classmethod
    def from_json(cls, data, dic) -> SearchOptions:
        r"""Create a SearchOptions object.

        **JSON attributes**:

         Optional:
          - n_max (int): largest tuple length (default: 6).
          - restarts (int): number of restarts (default: 32).
          - iterations (int): ascent iterations per restart (default: 200).
          - step (float): initial relative step (default: 0.1).
          - min_step (float): smallest step before stopping (default: 1e-6).
          - reassign_every (int): iterations between member swaps (default: 10).
        """
        validate(
            data,
            {
                'n_max': {'type': 'int', 'optional': True},
                'restarts': {'type': 'int', 'optional': True},
                'iterations': {'type': 'int', 'optional': True},
                'step': {'type': 'number', 'optional': True},
                'min_step': {'type': 'number', 'optional': True},
                'reassign_every': {'type': 'int', 'optional': True},
            },
        )
        return cls(**{k: v for k, v in data.items() if k not in ('id', 'type')})


@dataclass(frozen=True)
class TupleWitness:
    """Member assignment and input tuple attaining a ratio."""

    assignment: List[int]
    xs: Tensor

    @property
    def size(self) -> int:
        return len(self.assignment)


@dataclass(frozen=True)
class UpperCertificate:
    """Upper bound with its provenance: ``interpolation``, ``duality``,
    ``closed_form`` or ``uniform_norm``."""

    value: float
    provenance: str


@dataclass(frozen=True)
class LsBoundEstimate:
    r"""Sandwich :math:`\mathrm{lower} \le R^s(T) \le \mathrm{upper}`."""

    s: float
    lower: float
    witness: TupleWitness
    upper_certificate: Optional[UpperCertificate]
    seed: int

    @property
    def upper(self) -> Optional[float]:
        return None if self.upper_certificate is None else self.upper_certificate.value


def _value(objective: Objective, assignment: List[int], xs: Tensor) -> float:
    with torch.no_grad():
        value = float(objective(assignment, xs))
    return value if value == value else -1.0


def _reassign(
    objective: Objective,
    n_members: int,
    assignment: List[int],
    xs: Tensor,
    value: float,
) -> Tuple[List[int], float]:
    for n in range(len(assignment)):
        best_j, best = assignment[n], value
        for j in range(n_members):
            if j == assignment[n]:
                continue
            trial = assignment[:n] + [j] + assignment[n + 1 :]
            candidate = _value(objective, trial, xs)
            if candidate > best:
                best_j, best = j, candidate
        assignment = assignment[:n] + [best_j] + assignment[n + 1 :]
        value = best
    return assignment, value


def _ascend(
    objective: Objective,
    n_members: int,
    assignment: List[int],
    xs: Tensor,
    options: SearchOptions,
) -> Tuple[float, List[int], Tensor]:
    value = _value(objective, assignment, xs)
    step = options.step
    for iteration in range(options.iterations):
        if iteration % options.reassign_every == 0 and n_members > 1:
            assignment, value = _reassign(objective, n_members, assignment, xs, value)
        variable = xs.clone().requires_grad_(True)
        ratio = objective(assignment, variable)
        (gradient,) = torch.autograd.grad(ratio, variable)
        gradient_norm = float(gradient.norm())
        if not gradient_norm > 0 or gradient_norm != gradient_norm:
            break
        while step >= options.min_step:
            proposal = xs + step * float(xs.norm()) / gradient_norm * gradient
            candidate = _value(objective, assignment, proposal)
            if candidate > value:
                xs, value = proposal, candidate
                break
            step /= 2.0
        if step < options.min_step:
            break
    if n_members > 1:
        assignment, value = _reassign(objective, n_members, assignment, xs, value)
    return value, assignment, xs


def search_tuples(
    objective: Objective,
    n_members: int,
    shape: Sequence[int],
    options: SearchOptions,
    seed: int,
    warm_starts: Sequence[TupleWitness] = (),
) -> Tuple[float, TupleWitness]:
    """Maximize ``objective(assignment, xs)`` over assignments and tuples.

    Warm starts are ascended first; ties keep the earliest restart.

    :return: best value and its witness
    """
    generator = make_generator(seed)
    best = -1.0
    witness = None
    starts = [(list(w.assignment), w.xs.to(DTYPE).clone()) for w in warm_starts]
    for restart in range(options.restarts):
        n = restart % options.n_max + 1
        assignment = torch.randint(n_members, (n,), generator=generator).tolist()
        xs = torch.randn((n,) + tuple(shape), generator=generator, dtype=DTYPE)
        starts.append((assignment, xs))
    for index, (assignment, xs) in enumerate(starts):
        value, assignment, xs = _ascend(objective, n_members, assignment, xs, options)
        logger.debug('restart %d: N=%d ratio=%s', index, len(assignment), value)
        if value > best:
            best, witness = value, TupleWitness(assignment, xs.detach())
    return best, witness


def _pick_certificate(
    certificates: Sequence[UpperCertificate],
) -> Optional[UpperCertificate]:
    best = None
    for certificate in certificates:
        if best is None or certificate.value < best.value:
            best = certificate
    return best


def check_sandwich(item: str, lower: float, upper: Optional[UpperCertificate]):
    if upper is not None and lower > upper.value + SANDWICH_TOLERANCE:
        raise PropertyCheckError(
            item,
            f'lower bound {lower} exceeds the {upper.provenance} certificate '
            f'{upper.value}',
        )


def estimate_ls_bound(
    family: OperatorFamily,
    s: float,
    n_max: Optional[int] = None,
    budget: Optional[int] = None,
    seed: int = 0,
    options: Optional[SearchOptions] = None,
    certificates: Sequence[UpperCertificate] = (),
    warm_starts: Sequence[TupleWitness] = (),
) -> LsBoundEstimate:
    r"""Estimate :math:`R^s(T)` from below by tuple search and attach the
    cheapest valid upper certificate.

    Certificates computed here are ``closed_form`` for structured families
    and ``uniform_norm`` when ``s`` equals the common exponent of flat spaces;
    ``certificates`` adds interpolation or duality bounds computed elsewhere.

    :param OperatorFamily family: family
    :param float s: exponent in :math:`[1, \infty]`
    :param int n_max: largest tuple length (overrides ``options``)
    :param int budget: number of restarts (overrides ``options``)
    :param int seed: seed of the search
    :param SearchOptions options: search knobs
    :param certificates: externally computed upper bounds
    :param warm_starts: witnesses ascended before the random restarts
    :raises PropertyCheckError: if the lower bound exceeds the certificate
    """
    from .certificates import automatic_certificates

    s = check_exponent(s, 's', allow_inf=True, inclusive=True)
    if budget is not None and budget < 1:
        raise DomainError(f'budget must be >= 1, got {budget}')
    options = (options or SearchOptions()).with_budget(n_max, budget)

    def objective(assignment, xs):
        return ls_ratio_tensor(family, assignment, xs, s)

    lower, witness = search_tuples(
        objective, family.n_members, family.domain.shape, options, seed, warm_starts
    )
    lower = max(lower, 0.0)
    upper = _pick_certificate(
        list(automatic_certificates(family, s)) + list(certificates)
    )
    check_sandwich('ls-sandwich', lower, upper)
    logger.info(
        's=%s lower=%s upper=%s', s, lower, None if upper is None else upper.value
    )
    return LsBoundEstimate(s, lower, witness, upper, seed)
