from __future__ import annotations

import csv
import sys
from typing import Any, Iterable, Mapping, Optional, Sequence

import torch


def _plain(value: Any) -> Any:
    if isinstance(value, torch.Tensor):
        return value.item() if value.dim() == 0 else value.tolist()
    return value


class CSVWriter:
    r"""Write a table as CSV with ``#``-prefixed metadata lines.

    Metadata keys are written in sorted order and floats through ``repr``, so
    identical inputs produce identical bytes.

    :param str file_name: output path, standard output when None
    :param metadata: parameter map written as comment lines
    :type metadata: Mapping[str, Any] or None
    :param str delimiter: field delimiter
    """

    def __init__(
        self,
        file_name: Optional[str] = None,
        metadata: Optional[Mapping[str, Any]] = None,
        delimiter: str = ',',
    ) -> None:
        self.file_name = file_name
        self.metadata = dict(metadata) if metadata is not None else {}
        self.delimiter = delimiter
        self.f = None
        self.writer = None

    def initialize(self) -> None:
        if self.file_name:
            self.f = open(self.file_name, 'w', newline='')
        else:
            self.f = sys.stdout
        for key in sorted(self.metadata):
            self.f.write('# {}={}\n'.format(key, _plain(self.metadata[key])))
        self.writer = csv.writer(
            self.f, delimiter=self.delimiter, lineterminator='\n'
        )

    def log(self, row: Sequence[Any]) -> None:
        self.writer.writerow([_plain(x) for x in row])

    def close(self) -> None:
        if self.file_name and self.f is not None:
            self.f.close()
        self.f = None

    def __enter__(self) -> CSVWriter:
        self.initialize()
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def write_csv(
    file_name: Optional[str],
    header: Sequence[str],
    rows: Iterable[Sequence[Any]],
    metadata: Optional[Mapping[str, Any]] = None,
) -> None:
    """Write ``header`` and ``rows`` to ``file_name`` (standard output if
    None)."""
    with CSVWriter(file_name, metadata) as writer:
        writer.log(header)
        for row in rows:
            writer.log(row)
