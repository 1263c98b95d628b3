"""Aggregation plans (the SQL-shaped half of the plan language) and the
integer-expression evaluator used by CLUSTER OF k."""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..errors import BindError, EvalError
from ..mql.nodes import AggregateCall, Condition, IntBinary, IntExpr, IntLiteral
from .filters import eval_filter
from .table import Table
from .values import Kind, Value, is_numeric, is_temporal


@dataclass(frozen=True)
class GroupKey:
    """Plain column key, or a month()/year() derivation over a temporal column."""

    column: str
    derive: str | None = None  # None | "month" | "year"

    @property
    def output_name(self) -> str:
        return self.derive if self.derive else self.column


@dataclass(frozen=True)
class Aggregate:
    # op: "count_star" | "count" | "count_distinct" | "sum" | "min" | "max" | "avg"
    op: str
    column: str | None = None

    @property
    def output_name(self) -> str:
        if self.op == "count_star":
            return "count"
        prefix = {"count_distinct": "distinct"}.get(self.op, self.op)
        return f"{prefix}_{self.column}"


@dataclass(frozen=True)
class SortSpec:
    by: str          # an output column name
    descending: bool = False


@dataclass(frozen=True)
class AggregationPlan:
    source: str
    where: Condition | None = None
    group_by: tuple[GroupKey, ...] = ()
    aggregates: tuple[Aggregate, ...] = (Aggregate("count_star"),)
    sort: SortSpec | None = None
    limit: int | None = None


def _derive(value: Value, how: str) -> Value:
    if value is None:
        return None
    text = str(value)
    return text[:7] if how == "month" else int(text[:4])


def _bind_group_key(key: GroupKey, table: Table) -> tuple[int, Kind]:
    idx = table.column_index(key.column)
    kind = table.schema[idx][1]
    if key.derive is not None:
        if not is_temporal(kind):
            raise BindError(
                f"{key.derive}() requires a date/timestamp column, but "
                f"{key.column!r} is {kind.value}"
            )
        kind = Kind.TEXT if key.derive == "month" else Kind.INT
    return idx, kind


def _aggregate_kind(agg: Aggregate, table: Table) -> Kind:
    if agg.op == "count_star":
        return Kind.INT
    idx = table.column_index(agg.column or "")
    kind = table.schema[idx][1]
    if agg.op in ("count", "count_distinct"):
        return Kind.INT
    if agg.op == "avg":
        if not is_numeric(kind):
            raise EvalError(f"AVG over non-numeric column {agg.column!r} ({kind.value})")
        return Kind.DECIMAL
    if agg.op == "sum":
        if not is_numeric(kind):
            raise EvalError(f"SUM over non-numeric column {agg.column!r} ({kind.value})")
        return kind
    return kind  # min/max keep the source kind


def _apply_aggregate(agg: Aggregate, table: Table, rows: list[int]) -> Value:
    if agg.op == "count_star":
        return len(rows)
    col = table.column(agg.column or "")
    present = [col[i] for i in rows if col[i] is not None]
    if agg.op == "count":
        return len(present)
    if agg.op == "count_distinct":
        return len(set(present))
    if agg.op == "sum":
        return sum(present) if present else 0
    if not present:
        return None
    if agg.op == "min":
        return min(present)
    if agg.op == "max":
        return max(present)
    if agg.op == "avg":
        return sum(float(v) for v in present) / len(present)
    raise EvalError(f"unknown aggregate op {agg.op!r}")


def _sortable(value: Value):
    # None sorts first; mixed kinds never occur within one output column.
    return (value is not None, value)


def run_aggregation(plan: AggregationPlan, table: Table) -> Table:
    """Execute an aggregation plan over its (already resolved) source table.

    Output has one row per group, ordered by the sort spec if given and by
    ascending group key otherwise. month() keys render as "YYYY-MM".
    """
    rows = eval_filter(table, plan.where) if plan.where is not None else list(range(table.row_count))

    key_binds = [_bind_group_key(k, table) for k in plan.group_by]
    out_schema: list[tuple[str, Kind]] = [
        (key.output_name, kind) for key, (_, kind) in zip(plan.group_by, key_binds)
    ]
    for agg in plan.aggregates:
        out_schema.append((agg.output_name, _aggregate_kind(agg, table)))

    groups: dict[tuple[Value, ...], list[int]] = {}
    for i in rows:
        key = tuple(
            _derive(table.columns[idx][i], k.derive) if k.derive else table.columns[idx][i]
            for k, (idx, _) in zip(plan.group_by, key_binds)
        )
        groups.setdefault(key, []).append(i)
    if not plan.group_by and not groups:
        groups[()] = []  # global aggregates over an empty table still yield one row

    out_rows = []
    for key, members in groups.items():
        out_rows.append(list(key) + [_apply_aggregate(a, table, members) for a in plan.aggregates])

    out_names = [name for name, _ in out_schema]
    key_width = len(plan.group_by)
    out_rows.sort(key=lambda r: tuple(_sortable(v) for v in r[:key_width]))
    if plan.sort is not None:
        if plan.sort.by not in out_names:
            raise BindError(f"sort column {plan.sort.by!r} is not in the plan output")
        sort_idx = out_names.index(plan.sort.by)
        out_rows.sort(key=lambda r: _sortable(r[sort_idx]), reverse=plan.sort.descending)
    if plan.limit is not None:
        out_rows = out_rows[: plan.limit]

    columns: list[list[Value]] = [[r[i] for r in out_rows] for i in range(len(out_schema))]
    return Table(f"{table.name}_agg", out_schema, columns)


# --- IntExpr evaluation -------------------------------------------------------


def _resolve_column(column: str, tables: list[Table]) -> tuple[Table, int]:
    hits = [(t, t.column_names.index(column)) for t in tables if column in t.column_names]
    if not hits:
        raise BindError(f"no column {column!r} in the FROM tables")
    if len(hits) > 1:
        names = ", ".join(t.name for t, _ in hits)
        raise BindError(f"column {column!r} is ambiguous across {names}")
    return hits[0]


def evaluate_int_expr(expr: IntExpr, tables: list[Table]) -> int:
    """Evaluate a CLUSTER OF expression over the FROM tables.

    Total and deterministic: '/' is floor division, division by zero is an
    EvalError, and non-integer aggregate results (AVG, decimal MIN/MAX)
    floor to int.
    """
    if isinstance(expr, IntLiteral):
        return expr.value
    if isinstance(expr, AggregateCall):
        table, idx = _resolve_column(expr.column, tables)
        col = table.columns[idx]
        present = [v for v in col if v is not None]
        if expr.fn == "COUNT":
            return len(present)
        if expr.fn == "COUNT_DISTINCT":
            return len(set(present))
        if not present:
            raise EvalError(f"{expr.fn} over the empty column {expr.column!r}")
        kind = table.schema[idx][1]
        if expr.fn in ("MIN", "MAX", "AVG") and not is_numeric(kind):
            raise EvalError(f"{expr.fn} over non-numeric column {expr.column!r} ({kind.value})")
        if expr.fn == "MIN":
            return math.floor(min(present))
        if expr.fn == "MAX":
            return math.floor(max(present))
        return math.floor(sum(float(v) for v in present) / len(present))
    if isinstance(expr, IntBinary):
        left = evaluate_int_expr(expr.left, tables)
        right = evaluate_int_expr(expr.right, tables)
        if expr.op == "+":
            return left + right
        if expr.op == "-":
            return left - right
        if expr.op == "*":
            return left * right
        if right == 0:
            raise EvalError("division by zero in CLUSTER OF expression")
        return left // right
    raise EvalError(f"unsupported integer expression node {type(expr).__name__}")
