"""Result tables: CSV for machines, aligned text for people.

CSV cells use the shortest round-trip representation of each float
(``repr``), so a written file reads back bit-exactly and never depends on the
locale.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence, TextIO

Cell = object


def format_cell(value: Cell) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


def _format_text_cell(value: Cell) -> str:
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return "nan" if math.isnan(value) else f"{float(value):.6g}"
    return str(value)


@dataclass(frozen=True)
class Table:
    columns: tuple[str, ...]
    rows: tuple[tuple[Cell, ...], ...] = field(default=())
    title: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "columns", tuple(self.columns))
        object.__setattr__(self, "rows", tuple(tuple(row) for row in self.rows))
        width = len(self.columns)
        for index, row in enumerate(self.rows):
            if len(row) != width:
                raise ValueError(f"row {index} has {len(row)} cells, expected {width}")

    def column(self, name: str) -> list[Cell]:
        index = self.columns.index(name)
        return [row[index] for row in self.rows]

    def write_csv(self, stream: TextIO) -> None:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([format_cell(cell) for cell in row])

    def to_csv(self) -> str:
        buffer = io.StringIO()
        self.write_csv(buffer)
        return buffer.getvalue()

    def save_csv(self, path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="") as stream:
            self.write_csv(stream)
        return path

    def format_text(self) -> str:
        cells = [list(self.columns)] + [[_format_text_cell(c) for c in row] for row in self.rows]
        widths = [max(len(line[i]) for line in cells) for i in range(len(self.columns))]
        lines = []
        if self.title:
            lines.append(self.title)
        for number, line in enumerate(cells):
            lines.append("  ".join(text.rjust(width) for text, width in zip(line, widths)).rstrip())
            if number == 0:
                lines.append("  ".join("-" * width for width in widths))
        return "\n".join(lines)


def table_from_columns(title: str, columns: Sequence[tuple[str, Sequence[Cell]]]) -> Table:
    """Assemble a table from named, equally long columns."""

    names = tuple(name for name, _ in columns)
    values = [list(cells) for _, cells in columns]
    lengths = {len(cells) for cells in values}
    if len(lengths) > 1:
        raise ValueError("columns differ in length")
    rows = tuple(zip(*values)) if values else ()
    return Table(columns=names, rows=rows, title=title)


__all__ = ["Table", "format_cell", "table_from_columns"]
