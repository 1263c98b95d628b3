"""Value kinds, validation and CSV cell coercion.

Cells are plain Python values tagged by a column-level kind: None (Null),
int, float, str for text, and ISO-8601 strings for dates ("YYYY-MM-DD") and
timestamps ("YYYY-MM-DDThh:mm:ss", UTC, normalized). Keeping temporal
values as normalized ISO strings makes lexicographic comparison correct.
"""

from __future__ import annotations

import datetime as dt
from enum import Enum

from ..errors import IngestError

_INT64_MIN, _INT64_MAX = -(2**63), 2**63 - 1


class Kind(str, Enum):
    INT = "int"
    DECIMAL = "decimal"
    TEXT = "text"
    DATE = "date"
    TIMESTAMP = "timestamp"


Value = int | float | str | None


def parse_int(text: str) -> int | None:
    text = text.strip()
    if not text:
        return None
    try:
        value = int(text, 10)
    except ValueError:
        return None
    if not _INT64_MIN <= value <= _INT64_MAX:
        return None
    return value


def parse_decimal(text: str) -> float | None:
    text = text.strip()
    if not text:
        return None
    # Reject date-ish and exotic floats so inference doesn't swallow them.
    try:
        value = float(text)
    except ValueError:
        return None
    if value != value or value in (float("inf"), float("-inf")):
        return None
    return value


def parse_date(text: str) -> str | None:
    text = text.strip()
    if len(text) != 10:
        return None
    try:
        return dt.date.fromisoformat(text).isoformat()
    except ValueError:
        return None


def parse_timestamp(text: str) -> str | None:
    """Accepts YYYY-MM-DD and YYYY-MM-DDThh:mm:ss; normalizes to the latter."""
    text = text.strip()
    if not text:
        return None
    text = text.replace(" ", "T", 1)
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    if len(text) == 10:
        day = parse_date(text)
        return None if day is None else day + "T00:00:00"
    try:
        stamp = dt.datetime.fromisoformat(text)
    except ValueError:
        return None
    if stamp.tzinfo is not None:
        stamp = stamp.astimezone(dt.timezone.utc).replace(tzinfo=None)
    return stamp.isoformat(timespec="seconds")


_PARSERS = {
    Kind.INT: parse_int,
    Kind.DECIMAL: parse_decimal,
    Kind.DATE: parse_date,
    Kind.TIMESTAMP: parse_timestamp,
}

# Inference tries kinds in this priority order and keeps the first one that
# every non-empty cell satisfies; Text is the fallback.
INFERENCE_ORDER = [Kind.INT, Kind.DECIMAL, Kind.DATE, Kind.TIMESTAMP]


def infer_kind(cells: list[str]) -> Kind:
    non_empty = [c for c in cells if c.strip()]
    if not non_empty:
        return Kind.TEXT
    for kind in INFERENCE_ORDER:
        parser = _PARSERS[kind]
        if all(parser(c) is not None for c in non_empty):
            return kind
    return Kind.TEXT


def coerce_cell(text: str, kind: Kind, row: int, column: str) -> Value:
    """Convert one CSV cell to its kind; empty cells become Null."""
    if not text.strip():
        return None
    if kind is Kind.TEXT:
        return text
    value = _PARSERS[kind](text)
    if value is None:
        raise IngestError(
            f"cannot read {text!r} as {kind.value} (row {row}, column {column!r})"
        )
    return value


def is_numeric(kind: Kind) -> bool:
    return kind in (Kind.INT, Kind.DECIMAL)


def is_temporal(kind: Kind) -> bool:
    return kind in (Kind.DATE, Kind.TIMESTAMP)


def epoch_days(value: str) -> float:
    """Days since 1970-01-01 for a normalized Date/Timestamp string."""
    stamp = dt.datetime.fromisoformat(value) if "T" in value else dt.datetime.fromisoformat(value + "T00:00:00")
    return (stamp - dt.datetime(1970, 1, 1)).total_seconds() / 86400.0
