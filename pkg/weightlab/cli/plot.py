"""Deterministic SVG plots of numeric series."""

from __future__ import annotations

from typing import Mapping, Optional, Sequence, Tuple, Union

import matplotlib

matplotlib.use('Agg')

import matplotlib.pyplot as plt  # noqa: E402

from ..core.utils import DomainError  # noqa: E402

Series = Sequence[Tuple[float, float]]

SVG_SETTINGS = {'svg.hashsalt': 'weightlab', 'svg.fonttype': 'none'}


def emit_plot(
    series: Union[Series, Mapping[str, Series]],
    path: str,
    xlabel: str = 's',
    ylabel: str = 'lower bound',
    title: Optional[str] = None,
) -> str:
    """Plot one or several ``(x, y)`` series as markers joined by a polyline
    and save them as SVG.

    Identical input produces identical bytes: the hash salt is fixed and no
    date is written.

    :param series: list of points, or a mapping from legend labels to lists
    :param str path: output file
    :return: ``path``
    """
    if not isinstance(series, Mapping):
        series = {'': series}
    if len(series) == 0 or any(len(points) == 0 for points in series.values()):
        raise DomainError('cannot plot an empty series')
    with matplotlib.rc_context(SVG_SETTINGS):
        fig, ax = plt.subplots(figsize=(6, 4))
        for label, points in series.items():
            points = sorted(points)
            ax.plot(
                [x for x, _ in points],
                [y for _, y in points],
                marker='o',
                label=label or None,
            )
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        if title:
            ax.set_title(title)
        if any(series.keys()):
            ax.legend()
        fig.savefig(path, format='svg', metadata={'Date': None})
        plt.close(fig)
    return path
