"""Tabular output shared by the commands and the golden data files."""

import csv
import io
import json
from pathlib import Path

import jsonschema
from pydantic import BaseModel, Field
from rich.console import Console
from rich.table import Table as RichTable

from symplectic_restrictions.errors import GermParseError


def _display(cell: str) -> str:
    if cell == "inf":
        return "∞"
    return "≥" + cell[2:] if cell.startswith(">=") else cell


class Table(BaseModel):
    title: str = Field(description="Caption of the table.")
    columns: list[str] = Field(description="Column names, also the keys of jsonl records.")
    rows: list[list[str]] = Field(default_factory=list, description="Cells in machine form (`inf` for infinity).")
    notes: list[str] = Field(default_factory=list, description="Lines printed under the text rendering.")

    def add_row(self, *cells: object) -> None:
        if len(cells) != len(self.columns):
            raise ValueError(f"row with {len(cells)} cells for {len(self.columns)} columns in {self.title!r}")
        self.rows.append([str(c) for c in cells])

    def records(self) -> list[dict[str, str]]:
        return [dict(zip(self.columns, row, strict=True)) for row in self.rows]

    def column(self, name: str) -> list[str]:
        index = self.columns.index(name)
        return [row[index] for row in self.rows]

    def schema(self) -> dict:
        return {
            "type": "object",
            "properties": {name: {"type": "string"} for name in self.columns},
            "required": self.columns,
            "additionalProperties": False,
        }

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\r\n")
        writer.writerow(self.columns)
        writer.writerows(self.rows)
        return buffer.getvalue()

    def to_jsonl(self) -> str:
        schema = self.schema()
        lines = []
        for record in self.records():
            jsonschema.validate(record, schema)
            lines.append(json.dumps(record, ensure_ascii=False))
        return "\n".join(lines) + ("\n" if lines else "")

    def render(self, console: Console) -> None:
        table = RichTable(title=self.title)
        for name in self.columns:
            table.add_column(name)
        for row in self.rows:
            table.add_row(*(_display(cell) for cell in row))
        console.print(table)
        for note in self.notes:
            console.print(note)

    def emit(self, fmt: str, console: Console) -> None:
        if fmt == "csv":
            console.file.write(self.to_csv())
        elif fmt == "jsonl":
            console.file.write(self.to_jsonl())
        else:
            self.render(console)

    @classmethod
    def from_csv(cls, text: str, title: str = "") -> "Table":
        reader = csv.reader(io.StringIO(text))
        rows = [row for row in reader if row and not row[0].startswith("#")]
        if not rows:
            raise GermParseError(f"table {title!r} has no header")
        header, body = rows[0], rows[1:]
        for number, row in enumerate(body, start=2):
            if len(row) != len(header):
                raise GermParseError(f"row has {len(row)} cells, expected {len(header)}", number)
        return cls(title=title, columns=header, rows=body)

    @classmethod
    def from_jsonl(cls, text: str, title: str = "") -> "Table":
        records = [json.loads(line) for line in text.splitlines() if line.strip()]
        if not records:
            return cls(title=title, columns=[])
        columns = list(records[0])
        table = cls(title=title, columns=columns)
        schema = table.schema()
        for record in records:
            jsonschema.validate(record, schema)
            table.rows.append([record[name] for name in columns])
        return table

    @classmethod
    def load(cls, path: Path) -> "Table":
        return cls.from_csv(path.read_text(encoding="utf-8"), title=path.stem)
