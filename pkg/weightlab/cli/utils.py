from __future__ import annotations

import argparse
import logging
import os
from typing import Any, Dict, Optional, Sequence

import torch

from ..core.utils import DomainError
from ..lattice.domain import MixedSpace

logger = logging.getLogger(__name__)

THREADS_VARIABLE = 'WEIGHTLAB_THREADS'


def configure_threads() -> Optional[int]:
    """Cap intra-op parallelism with ``WEIGHTLAB_THREADS`` when it is set."""
    value = os.environ.get(THREADS_VARIABLE)
    if value is None or value.strip() == '':
        return None
    try:
        threads = int(value)
    except ValueError:
        threads = 0
    if threads < 1:
        raise DomainError(f'{THREADS_VARIABLE} must be a positive int, got {value}')
    torch.set_num_threads(threads)
    logger.debug('using %d threads', threads)
    return threads


def _plain(value: Any) -> Any:
    if isinstance(value, (list, tuple)):
        return ','.join(repr(x) if isinstance(x, float) else str(x) for x in value)
    return value


def parameter_map(arg: argparse.Namespace) -> Dict[str, Any]:
    """Parsed arguments as CSV metadata, without the dispatch function and
    unset options."""
    return {
        key: _plain(value)
        for key, value in vars(arg).items()
        if key != 'func' and value is not None
    }


def mixed_space(
    sizes: Optional[Sequence[int]], exponents: Optional[Sequence[float]]
) -> MixedSpace:
    """Counting-measure space from ``--axes`` and ``--q``; a single exponent
    applies to every axis and a missing one defaults to 2."""
    sizes = list(sizes or [])
    exponents = list(exponents or [])
    if len(exponents) == 0:
        exponents = [2.0] * len(sizes)
    elif len(exponents) == 1:
        exponents = exponents * len(sizes)
    if len(exponents) != len(sizes):
        raise DomainError(
            f'{len(sizes)} axes but {len(exponents)} exponents were given'
        )
    return MixedSpace.counting(sizes, exponents)
