"""Reading of darwin-mbl results tables.

A table is comma-separated text with ``#``-prefixed metadata lines (mostly
``key = value``, plus free-form markers such as crossing estimates) followed
by one header row and data rows.  Numeric cells parse to float with empty
cells as NaN; values that are not numeric stay as strings.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class TableError(ValueError):
    pass


class EmptyTableError(TableError):
    pass


class MissingColumnError(TableError):
    pass


@dataclass
class ResultsTable:
    path: str
    meta: dict[str, str]
    markers: list[str]  # metadata lines that are not key = value pairs
    columns: list[str]
    cells: list[list[str]]
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def n_rows(self) -> int:
        return len(self.cells)

    def column(self, name: str) -> np.ndarray:
        """Numeric column; empty cells become NaN."""
        if name not in self.columns:
            raise MissingColumnError(f"{self.path}: no column {name!r}")
        if name not in self._cache:
            i = self.columns.index(name)
            self._cache[name] = np.array(
                [float(row[i]) if row[i] else np.nan for row in self.cells]
            )
        return self._cache[name]

    def require(self, *names: str) -> None:
        missing = [n for n in names if n not in self.columns]
        if missing:
            raise MissingColumnError(f"{self.path}: missing columns {missing}")

    def crossings(self) -> list[dict[str, str]]:
        """Parsed ``crossing key=value ...`` marker lines."""
        out = []
        for line in self.markers:
            if not line.startswith("crossing "):
                continue
            entry = {}
            for token in line.split()[1:]:
                key, _, value = token.partition("=")
                entry[key] = value
            out.append(entry)
        return out


def read_table(path: str | Path) -> ResultsTable:
    meta: dict[str, str] = {}
    markers: list[str] = []
    columns: list[str] | None = None
    cells: list[list[str]] = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body and " = " in body:
                key, _, value = body.partition("=")
                meta[key.strip()] = value.strip()
            elif body:
                markers.append(body)
            continue
        if not line.strip():
            continue
        if columns is None:
            columns = line.split(",")
        else:
            cells.append(line.split(","))
    if columns is None or not cells:
        raise EmptyTableError(f"{path}: no data rows")
    return ResultsTable(
        path=str(path), meta=meta, markers=markers, columns=columns, cells=cells
    )
