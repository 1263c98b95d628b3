"""Condition binding and row filtering over a single table.

Null semantics: every comparison with a Null cell is false; AND/OR/NOT are
plain boolean on top of that. Comparisons between incomparable kinds
(text vs number) are also false, keeping evaluation total.
"""

from __future__ import annotations

from typing import Callable

from ..errors import BindError, EvalError
from ..mql.nodes import (
    AndCond,
    ColumnRef,
    Comparison,
    Condition,
    Literal,
    NotCond,
    OrCond,
)
from .table import Table
from .values import Kind, Value, is_numeric, is_temporal, parse_timestamp

_OPS: dict[str, Callable[[Value, Value], bool]] = {
    "=": lambda a, b: a == b,
    "<>": lambda a, b: a != b,
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
}


def _bind_operand(op, table: Table):
    """Return (getter, kind) for one comparison side."""
    if isinstance(op, ColumnRef):
        idx = table.column_index(op.name)  # raises BindError with the name
        kind = table.schema[idx][1]
        return (lambda i, c=table.columns[idx]: c[i]), kind
    lit: Literal = op
    if lit.kind == "int":
        return (lambda i, v=int(lit.value): v), Kind.INT
    if lit.kind == "decimal":
        return (lambda i, v=float(lit.value): v), Kind.DECIMAL
    return (lambda i, v=str(lit.value): v), Kind.TEXT


def _comparable(left_kind: Kind, right_kind: Kind) -> bool:
    if is_numeric(left_kind) and is_numeric(right_kind):
        return True
    if left_kind == right_kind:
        return True
    # Temporal cells are ISO strings; string literals compare against them
    # lexicographically (validated below).
    if is_temporal(left_kind) and right_kind is Kind.TEXT:
        return True
    if left_kind is Kind.TEXT and is_temporal(right_kind):
        return True
    return False


def _validate_temporal_literal(op, other_kind: Kind) -> None:
    if isinstance(op, Literal) and op.kind == "string" and is_temporal(other_kind):
        if parse_timestamp(str(op.value)) is None:
            raise EvalError(
                f"{op.value!r} is not a valid ISO-8601 literal for a {other_kind.value} column"
            )


def compile_condition(cond: Condition, table: Table) -> Callable[[int], bool]:
    """Bind a condition against a table's schema; returns a row predicate."""
    if isinstance(cond, Comparison):
        left, lk = _bind_operand(cond.left, table)
        right, rk = _bind_operand(cond.right, table)
        _validate_temporal_literal(cond.left, rk)
        _validate_temporal_literal(cond.right, lk)
        if not _comparable(lk, rk):
            return lambda i: False
        fn = _OPS[cond.op]

        def predicate(i: int) -> bool:
            a, b = left(i), right(i)
            if a is None or b is None:
                return False
            return fn(a, b)

        return predicate
    if isinstance(cond, NotCond):
        inner = compile_condition(cond.inner, table)
        return lambda i: not inner(i)
    if isinstance(cond, AndCond):
        l = compile_condition(cond.left, table)
        r = compile_condition(cond.right, table)
        return lambda i: l(i) and r(i)
    if isinstance(cond, OrCond):
        l = compile_condition(cond.left, table)
        r = compile_condition(cond.right, table)
        return lambda i: l(i) or r(i)
    raise BindError(f"unsupported condition node {type(cond).__name__}")


def eval_filter(table: Table, cond: Condition) -> list[int]:
    """Indices of rows where the bound condition is true."""
    predicate = compile_condition(cond, table)
    return [i for i in range(table.row_count) if predicate(i)]
