"""Typed columnar tables, CSV ingestion and INSPECT-style cleaning."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import BindError, EvalError, IngestError
from ..mql.nodes import InspectDirective, Literal
from .values import Kind, Value, coerce_cell, infer_kind


@dataclass
class Table:
    """An immutable-by-convention columnar table.

    All columns have row_count entries; column names are unique. Cells are
    Python scalars with None for Null (see values.py for representations).
    """

    name: str
    schema: list[tuple[str, Kind]]
    columns: list[list[Value]] = field(default_factory=list)

    def __post_init__(self):
        names = [c for c, _ in self.schema]
        if len(set(names)) != len(names):
            raise IngestError(f"duplicate column names in table {self.name!r}")
        lengths = {len(col) for col in self.columns}
        if len(lengths) > 1:
            raise IngestError(f"ragged columns in table {self.name!r}")

    @property
    def row_count(self) -> int:
        return len(self.columns[0]) if self.columns else 0

    @property
    def column_names(self) -> list[str]:
        return [c for c, _ in self.schema]

    def column_index(self, name: str) -> int:
        for i, (col, _) in enumerate(self.schema):
            if col == name:
                return i
        raise BindError(f"no column {name!r} in table {self.name!r}")

    def column(self, name: str) -> list[Value]:
        return self.columns[self.column_index(name)]

    def kind_of(self, name: str) -> Kind:
        return self.schema[self.column_index(name)][1]

    def row(self, i: int) -> tuple[Value, ...]:
        return tuple(col[i] for col in self.columns)

    def rows(self) -> list[tuple[Value, ...]]:
        return [self.row(i) for i in range(self.row_count)]

    def take(self, indices: list[int], name: str | None = None) -> "Table":
        """New table holding the given rows, in the given order."""
        return Table(
            name or self.name,
            list(self.schema),
            [[col[i] for i in indices] for col in self.columns],
        )

    def equals(self, other: "Table") -> bool:
        return self.schema == other.schema and self.columns == other.columns


def ingest_csv(
    path: str | Path,
    name: str | None = None,
    declared_schema: dict[str, Kind] | None = None,
) -> Table:
    """Read an RFC-4180 CSV (UTF-8, header row required) into a typed table.

    Without a declared schema, each column's kind is inferred over all rows
    in priority order Int, Decimal, Date, Timestamp, Text. Empty cells
    become Null. Header names are preserved verbatim (hyphens allowed).
    """
    path = Path(path)
    with open(path, newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestError(f"{path}: missing header row") from None
        raw_rows = []
        for row_no, row in enumerate(reader, start=1):
            if len(row) != len(header):
                raise IngestError(
                    f"{path}: row {row_no} has {len(row)} fields, expected {len(header)}"
                )
            raw_rows.append(row)

    if declared_schema is not None:
        missing = set(declared_schema) - set(header)
        if missing:
            raise IngestError(f"{path}: declared schema names unknown columns {sorted(missing)}")
        kinds = [declared_schema.get(col, Kind.TEXT) for col in header]
    else:
        kinds = [infer_kind([row[i] for row in raw_rows]) for i in range(len(header))]

    columns: list[list[Value]] = [[] for _ in header]
    for row_no, row in enumerate(raw_rows, start=1):
        for i, cell in enumerate(row):
            columns[i].append(coerce_cell(cell, kinds[i], row_no, header[i]))

    table_name = name if name is not None else path.stem
    return Table(table_name, list(zip(header, kinds)), columns)


def _literal_matches(kind: Kind, lit: Literal) -> Value:
    """Coerce an MQL literal to a column kind, or raise EvalError."""
    if kind is Kind.INT and lit.kind == "int":
        return int(lit.value)
    if kind is Kind.DECIMAL and lit.kind in ("int", "decimal"):
        return float(lit.value)
    if kind is Kind.TEXT and lit.kind == "string":
        return str(lit.value)
    if kind in (Kind.DATE, Kind.TIMESTAMP) and lit.kind == "string":
        from .values import parse_date, parse_timestamp

        parsed = parse_date(str(lit.value)) if kind is Kind.DATE else parse_timestamp(str(lit.value))
        if parsed is None:
            raise EvalError(f"{lit.value!r} is not a valid {kind.value} literal")
        return parsed
    raise EvalError(f"cannot fill a {kind.value} column with {lit.to_mql()}")


def apply_inspect(table: Table, directives: list[InspectDirective]) -> Table:
    """Apply cleaning directives in order, returning a new table.

    dropnull(col) removes rows with Null in col; fillnull(col, lit) replaces
    Nulls; dedupe() drops exact-duplicate rows keeping the first. The input
    table is never mutated.
    """
    current = table
    for d in directives:
        if d.name == "dedupe":
            seen: set[tuple[Value, ...]] = set()
            keep = []
            for i in range(current.row_count):
                r = current.row(i)
                if r not in seen:
                    seen.add(r)
                    keep.append(i)
            current = current.take(keep)
            continue
        idx = current.column_index(d.column or "")
        if d.name == "dropnull":
            keep = [i for i, v in enumerate(current.columns[idx]) if v is not None]
            current = current.take(keep)
        else:  # fillnull
            kind = current.schema[idx][1]
            fill = _literal_matches(kind, d.fill)  # type: ignore[arg-type]
            new_cols = [list(col) for col in current.columns]
            new_cols[idx] = [fill if v is None else v for v in new_cols[idx]]
            current = Table(current.name, list(current.schema), new_cols)
    return current
