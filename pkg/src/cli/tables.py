"""
Tabular output for the command-line runner.

Floats are written as shortest round-trip decimals (repr), so identical
runs produce byte-identical files.
"""

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, TextIO

FORMATS = ("csv", "json")


@dataclass
class Table:
    """Named columns and rows of plain values."""

    columns: Sequence[str]
    rows: List[Sequence[Any]] = field(default_factory=list)

    def add_row(self, *values: Any):
        if len(values) != len(self.columns):
            raise ValueError(f"Row has {len(values)} values for {len(self.columns)} columns")
        self.rows.append(tuple(values))

    def records(self) -> List[Dict[str, Any]]:
        return [dict(zip(self.columns, row)) for row in self.rows]

    def __len__(self) -> int:
        return len(self.rows)


def format_value(value: Any) -> str:
    """CSV cell text for one value."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if value is None:
        return ""
    return str(value)


def to_csv(table: Table) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([format_value(v) for v in row])
    return buffer.getvalue()


def to_json(table: Table) -> str:
    return json.dumps(table.records(), indent=2) + "\n"


def render(table: Table, fmt: str) -> str:
    """
    Serialize a table.

    Args:
        table: Table to write
        fmt: "csv" or "json"

    Returns:
        Serialized text
    """
    if fmt == "csv":
        return to_csv(table)
    if fmt == "json":
        return to_json(table)
    raise ValueError(f"Unknown output format: {fmt}")


def write_table(table: Table, fmt: str, output: Optional[Path], stream: TextIO):
    """Write to `output` when given, otherwise to `stream`."""
    text = render(table, fmt)
    if output is None:
        stream.write(text)
        return
    output = Path(output)
    output.parent.mkdir(parents=True, exist_ok=True)
    output.write_text(text, encoding="utf-8")
