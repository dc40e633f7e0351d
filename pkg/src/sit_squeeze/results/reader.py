"""Read result CSVs back as column arrays."""
from __future__ import annotations

import csv
from collections.abc import Sequence
from pathlib import Path

import numpy as np

from ..errors import PlotInputError


def read_table(path: str | Path, required: Sequence[str],
               text_columns: Sequence[str] = ()) -> dict[str, np.ndarray]:
    """Columns of a result CSV; numeric columns as float arrays.

    Raises PlotInputError naming the missing column or the malformed row.
    """
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            raise PlotInputError(f"{path}: file is empty") from None
        missing = [c for c in required if c not in header]
        if missing:
            raise PlotInputError(f"{path}: missing column '{missing[0]}'")
        columns: dict[str, list] = {c: [] for c in header}
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise PlotInputError(f"{path}:{lineno}: expected {len(header)} fields, "
                                     f"got {len(row)}")
            for name, cell in zip(header, row):
                if name in text_columns:
                    columns[name].append(cell)
                    continue
                try:
                    columns[name].append(float(cell))
                except ValueError:
                    raise PlotInputError(f"{path}:{lineno}: column '{name}' has non-numeric "
                                         f"value '{cell}'") from None
    if not columns[header[0]]:
        raise PlotInputError(f"{path}: no data rows")
    return {name: (np.asarray(v, dtype=object) if name in text_columns
                   else np.asarray(v, dtype=float)) for name, v in columns.items()}
