"""Finite operator families acting between mixed-norm spaces."""

from __future__ import annotations

import math
from typing import List, Optional, Sequence, Union

import torch
from torch import Tensor

from ..core.logger import write_csv
from ..core.serializable import JSONSerializable
from ..core.utils import (
    DTYPE,
    DomainError,
    as_tensor,
    process_object,
    register_class,
    validate,
)
from ..lattice.domain import MixedSpace
from ..lattice.io import parse_float, read_table
from ..lattice.norms import tuple_norm

GENERIC = 'generic'
MULTIPLICATION = 'multiplication'
WEIGHTED_COMPOSITION = 'weighted_composition'
STRUCTURES = (GENERIC, MULTIPLICATION, WEIGHTED_COMPOSITION)


@register_class
class OperatorFamily(JSONSerializable):
    r"""Family :math:`\{T_j\}` of dense matrices from ``domain`` to
    ``codomain``, acting on flattened tensors.

    :param members: tensor of shape ``(J, codomain.dim, domain.dim)``
    :param MixedSpace domain: space of the inputs
    :param codomain: space of the outputs, ``domain`` when None
    :type codomain: MixedSpace or None
    :param labels: member names, ``T0, T1, ...`` when None
    :param str structure: one of ``generic``, ``multiplication`` (diagonal
        members) and ``weighted_composition`` (at most one nonzero entry per
        row and per column)
    """

    def __init__(
        self,
        members: Union[Tensor, Sequence],
        domain: MixedSpace,
        codomain: Optional[MixedSpace] = None,
        labels: Optional[Sequence[str]] = None,
        structure: str = GENERIC,
    ) -> None:
        members = as_tensor(members)
        codomain = domain if codomain is None else codomain
        if members.dim() == 2:
            members = members.unsqueeze(0)
        if members.dim() != 3 or members.shape[0] == 0:
            raise DomainError('members must form a nonempty (J, m, n) tensor')
        if members.shape[1:] != (codomain.dim, domain.dim):
            raise DomainError(
                f'members of shape {tuple(members.shape[1:])} do not map a space '
                f'of dimension {domain.dim} into one of dimension {codomain.dim}'
            )
        if not bool(torch.all(torch.isfinite(members))):
            raise DomainError('member entries must be finite')
        if structure not in STRUCTURES:
            raise DomainError(f'unknown structure `{structure}\'')
        self.members = members
        self.domain = domain
        self.codomain = codomain
        self.labels = (
            list(labels)
            if labels is not None
            else [f'T{j}' for j in range(members.shape[0])]
        )
        if len(self.labels) != members.shape[0]:
            raise DomainError('one label per member is required')
        self.structure = structure
        self._check_structure()

    def _check_structure(self) -> None:
        if self.structure == GENERIC:
            return
        if self.domain != self.codomain:
            raise DomainError(f'{self.structure} families act within one space')
        nonzero = self.members != 0
        if self.structure == MULTIPLICATION:
            eye = torch.eye(self.domain.dim, dtype=torch.bool)
            if bool((nonzero & ~eye).any()):
                raise DomainError('multiplication members must be diagonal')
        elif (
            bool((nonzero.sum(-1) > 1).any())
            or bool((nonzero.sum(-2) > 1).any())
        ):
            raise DomainError(
                'weighted composition members need at most one nonzero entry '
                'per row and per column'
            )

    @property
    def n_members(self) -> int:
        return self.members.shape[0]

    def __len__(self) -> int:
        return self.n_members

    def apply(self, j: int, x: Tensor) -> Tensor:
        """Apply member ``j`` to a tensor of shape ``domain.shape``."""
        out = self.members[j] @ as_tensor(x).reshape(-1)
        return out.reshape(self.codomain.shape)

    def apply_tuple(self, assignment: Sequence[int], xs: Tensor) -> Tensor:
        """Apply member ``assignment[n]`` to ``xs[n]`` for every ``n``."""
        if len(assignment) != xs.shape[0]:
            raise DomainError(
                f'{len(assignment)} members assigned to {xs.shape[0]} inputs'
            )
        flat = xs.reshape(xs.shape[0], -1)
        chosen = self.members[torch.as_tensor(list(assignment), dtype=torch.long)]
        out = torch.einsum('nij,nj->ni', chosen, flat)
        return out.reshape((xs.shape[0],) + self.codomain.shape)

    def scaled(self, factor: float) -> OperatorFamily:
        return OperatorFamily(
            self.members * factor,
            self.domain,
            self.codomain,
            self.labels,
            self.structure,
        )

    def __repr__(self) -> str:
        return (
            f'OperatorFamily({self.n_members} members, {self.structure}, '
            f'{self.domain!r} -> {self.codomain!r})'
        )

    @classmethod
    def from_json(cls, data, dic) -> OperatorFamily:
        r"""Create an OperatorFamily object.

        **JSON attributes**:

         Mandatory:
          - members (list): one matrix (list of rows) per member.
          - domain (MixedSpace): input space.

         Optional:
          - codomain (MixedSpace): output space (default: domain).
          - labels (list[str]): member names.
          - structure (str): generic, multiplication or weighted_composition.
        """
        validate(
            data,
            {
                'members': {'type': 'list', 'list': True},
                'domain': {'type': 'object|string'},
                'codomain': {'type': 'object|string', 'optional': True},
                'labels': {'type': 'string', 'list': True, 'optional': True},
                'structure': {'type': 'string', 'optional': True},
            },
        )
        domain = process_object(data['domain'], dic)
        codomain = (
            process_object(data['codomain'], dic) if 'codomain' in data else None
        )
        return cls(
            data['members'],
            domain,
            codomain,
            data.get('labels'),
            data.get('structure', GENERIC),
        )


def ls_ratio_tensor(
    family: OperatorFamily, assignment: Sequence[int], xs: Tensor, s: float
) -> Tensor:
    """Differentiable :func:`ls_ratio`."""
    denominator = tuple_norm(xs, s, family.domain)
    numerator = tuple_norm(family.apply_tuple(assignment, xs), s, family.codomain)
    return numerator / denominator


def ls_ratio(
    assignment: Sequence[int],
    xs: Union[Tensor, Sequence],
    s: float,
    family: OperatorFamily,
) -> float:
    r"""Return :math:`\|(\sum_n |T_{j_n} x_n|^s)^{1/s}\|_Y /
    \|(\sum_n |x_n|^s)^{1/s}\|_X`, a lower bound of :math:`R^s(T)`.

    :param assignment: member index of every tuple entry
    :param xs: inputs stacked along the first dimension
    :param float s: exponent in :math:`[1, \infty]`
    :param OperatorFamily family: family
    """
    xs = torch.stack([as_tensor(x) for x in xs]) if not isinstance(xs, Tensor) else xs
    xs = xs.to(DTYPE)
    if tuple(xs.shape[1:]) != family.domain.shape:
        raise DomainError(
            f'inputs of shape {tuple(xs.shape[1:])} do not match {family.domain.shape}'
        )
    if any(not 0 <= j < family.n_members for j in assignment):
        raise DomainError('member index out of range')
    if float(tuple_norm(xs, s, family.domain)) == 0.0:
        raise DomainError('the input tuple has zero norm')
    return float(ls_ratio_tensor(family, assignment, xs, s))


def _flat_exponent(space: MixedSpace) -> Optional[float]:
    if space.n_axes == 0:
        return 2.0
    if not space.is_flat:
        return None
    return space.exponents[0]


def _flat_masses(space: MixedSpace) -> Tensor:
    return space.masses().reshape(-1)


def operator_norm_bound(
    matrix: Tensor, domain: MixedSpace, codomain: MixedSpace
) -> Optional[float]:
    r"""Upper bound of :math:`\|T\|_{L^q(\mu) \to L^q(\nu)}` for flat spaces
    sharing one exponent, None otherwise.

    Exact for :math:`q \in \{1, 2, \infty\}`; the Riesz-Thorin bound
    :math:`\|T\|_1^{1/q}\|T\|_\infty^{1-1/q}` in between.

    :example:
    >>> space = MixedSpace.counting([2], [3])
    >>> operator_norm_bound(torch.eye(2, dtype=torch.float64) * 2, space, space)
    2.0
    """
    q = _flat_exponent(domain)
    if q is None or _flat_exponent(codomain) != q:
        return None
    mu = _flat_masses(domain)
    nu = _flat_masses(codomain)
    a = matrix.abs()
    norm_inf = float(a.sum(-1).max())
    norm_one = float(((nu.unsqueeze(1) * a).sum(0) / mu).max())
    if math.isinf(q):
        return norm_inf
    if q == 1.0:
        return norm_one
    if q == 2.0:
        scaled = nu.sqrt().unsqueeze(1) * matrix / mu.sqrt().unsqueeze(0)
        return float(torch.linalg.matrix_norm(scaled, ord=2))
    return norm_one ** (1.0 / q) * norm_inf ** (1.0 - 1.0 / q)


def uniform_norm(family: OperatorFamily) -> Optional[float]:
    r""":math:`\max_j` of :func:`operator_norm_bound` over the members."""
    bounds = [
        operator_norm_bound(member, family.domain, family.codomain)
        for member in family.members
    ]
    if any(b is None for b in bounds):
        return None
    return max(bounds)


def check_dual_exponents(space: MixedSpace) -> None:
    if any(q <= 1.0 or math.isinf(q) for q in space.exponents):
        raise DomainError(
            f'duality needs exponents in (1, inf), got {space.exponents}'
        )


def adjoint_family(family: OperatorFamily) -> OperatorFamily:
    r"""Family of adjoints :math:`T_j^* = M_X^{-1} T_j^{\top} M_Y` on the dual
    spaces, where :math:`M` are the diagonal atom masses, so that
    :math:`\langle T_j f, g\rangle_Y = \langle f, T_j^* g\rangle_X`."""
    check_dual_exponents(family.domain)
    check_dual_exponents(family.codomain)
    mu = _flat_masses(family.domain)
    nu = _flat_masses(family.codomain)
    members = family.members.transpose(-1, -2) * nu / mu.unsqueeze(-1)
    return OperatorFamily(
        members,
        family.codomain.dual(),
        family.domain.dual(),
        [label + '*' for label in family.labels],
        family.structure,
    )


def read_family(
    file_name: str,
    domain: MixedSpace,
    codomain: Optional[MixedSpace] = None,
    structure: str = GENERIC,
) -> OperatorFamily:
    """Read a ``member,row,col,value`` table; entries not listed are zero."""
    codomain = domain if codomain is None else codomain
    _, header, rows = read_table(file_name)
    if header != ['member', 'row', 'col', 'value']:
        raise DomainError(f'{file_name}: row 1: header must be member,row,col,value')
    entries = []
    for line_number, fields in rows:
        if len(fields) != 4:
            raise DomainError(f'{file_name}: row {line_number}: expected 4 fields')
        try:
            j, i, k = (int(x) for x in fields[:3])
        except ValueError:
            raise DomainError(
                f'{file_name}: row {line_number}: member, row and col must be integers'
            ) from None
        if j < 0 or not 0 <= i < codomain.dim or not 0 <= k < domain.dim:
            raise DomainError(f'{file_name}: row {line_number}: index out of range')
        entries.append((j, i, k, parse_float(file_name, line_number, fields[3])))
    if len(entries) == 0:
        raise DomainError(f'{file_name}: no data rows')
    members = torch.zeros(
        (max(e[0] for e in entries) + 1, codomain.dim, domain.dim), dtype=DTYPE
    )
    for j, i, k, value in entries:
        members[j, i, k] = value
    return OperatorFamily(members, domain, codomain, structure=structure)


def write_family(family: OperatorFamily, file_name: Optional[str], metadata=None):
    nonzero = torch.nonzero(family.members)
    rows: List[list] = [
        [j, i, k, float(family.members[j, i, k])] for j, i, k in nonzero.tolist()
    ]
    meta = {'structure': family.structure}
    meta.update(metadata or {})
    write_csv(file_name, ['member', 'row', 'col', 'value'], rows, meta)
