"""AST node types for MQL statements, plus the canonical pretty-printer.

Structural equality deliberately ignores source spans so that a
pretty-printed statement reparses to an equal tree.
"""

from __future__ import annotations

from dataclasses import dataclass, field

_IDENT_OK = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_")

from .tokens import KEYWORDS


def format_ident(name: str) -> str:
    """Quote an identifier unless it matches the bare-identifier syntax."""
    bare = (
        name
        and not set(name) - _IDENT_OK
        and not name[0].isdigit()
        and name.upper() not in KEYWORDS
    )
    if bare:
        return name
    return '"' + name.replace('"', '""') + '"'


def format_string(value: str) -> str:
    return "'" + value.replace("'", "''") + "'"


def format_decimal(value: float) -> str:
    text = repr(value)
    return text if "." in text or "e" in text or "E" in text else text + ".0"


# --- Scalar expressions (WHERE conditions) ---------------------------------

@dataclass(frozen=True)
class ColumnRef:
    name: str

    def to_mql(self) -> str:
        return format_ident(self.name)


@dataclass(frozen=True)
class Literal:
    # kind: "int" | "decimal" | "string"
    kind: str
    value: int | float | str

    def to_mql(self) -> str:
        if self.kind == "int":
            return str(self.value)
        if self.kind == "decimal":
            return format_decimal(float(self.value))
        return format_string(str(self.value))


Operand = ColumnRef | Literal


@dataclass(frozen=True)
class Comparison:
    op: str  # "=", "<>", "<", "<=", ">", ">="
    left: Operand
    right: Operand

    def to_mql(self) -> str:
        return f"{self.left.to_mql()} {self.op} {self.right.to_mql()}"


@dataclass(frozen=True)
class NotCond:
    inner: "Condition"

    def to_mql(self) -> str:
        return f"NOT {_paren(self.inner, max_level=_LEVEL_NOT)}"


@dataclass(frozen=True)
class AndCond:
    left: "Condition"
    right: "Condition"

    def to_mql(self) -> str:
        # Left-associative grammar: an equal-strength right child must keep
        # its parentheses or the reparse would rebalance the tree.
        return f"{_paren(self.left, _LEVEL_AND)} AND {_paren(self.right, _LEVEL_AND + 1)}"


@dataclass(frozen=True)
class OrCond:
    left: "Condition"
    right: "Condition"

    def to_mql(self) -> str:
        return f"{_paren(self.left, _LEVEL_OR)} OR {_paren(self.right, _LEVEL_OR + 1)}"


Condition = Comparison | NotCond | AndCond | OrCond

# Binding strength: comparisons bind tightest, OR loosest. A child printed at
# strictly lower strength than its context needs parentheses.
_LEVEL_OR, _LEVEL_AND, _LEVEL_NOT, _LEVEL_CMP = 0, 1, 2, 3


def _level(cond: Condition) -> int:
    if isinstance(cond, OrCond):
        return _LEVEL_OR
    if isinstance(cond, AndCond):
        return _LEVEL_AND
    if isinstance(cond, NotCond):
        return _LEVEL_NOT
    return _LEVEL_CMP


def _paren(cond: Condition, max_level: int) -> str:
    text = cond.to_mql()
    return f"({text})" if _level(cond) < max_level else text


# --- Integer expressions (CLUSTER OF k) -------------------------------------

@dataclass(frozen=True)
class IntLiteral:
    value: int

    def to_mql(self) -> str:
        return str(self.value)


@dataclass(frozen=True)
class AggregateCall:
    # fn: "COUNT" | "COUNT_DISTINCT" | "MIN" | "MAX" | "AVG"
    fn: str
    column: str

    def to_mql(self) -> str:
        if self.fn == "COUNT_DISTINCT":
            return f"COUNT(DISTINCT {format_ident(self.column)})"
        return f"{self.fn}({format_ident(self.column)})"


@dataclass(frozen=True)
class IntBinary:
    op: str  # "+", "-", "*", "/"
    left: "IntExpr"
    right: "IntExpr"

    def to_mql(self) -> str:
        lp = _int_paren(self.left, _INT_LEVEL[self.op])
        # Left-associative grammar: equal-strength right children stay
        # parenthesized so the reparse reproduces this exact tree.
        rp = _int_paren(self.right, _INT_LEVEL[self.op] + 1)
        return f"{lp} {self.op} {rp}"


IntExpr = IntLiteral | AggregateCall | IntBinary

_INT_LEVEL = {"+": 1, "-": 1, "*": 2, "/": 2}


def _int_level(expr: IntExpr) -> int:
    return _INT_LEVEL[expr.op] if isinstance(expr, IntBinary) else 3


def _int_paren(expr: IntExpr, max_level: int) -> str:
    text = expr.to_mql()
    return f"({text})" if _int_level(expr) < max_level else text


# --- Task / clause nodes -----------------------------------------------------

@dataclass(frozen=True)
class Prediction:
    target: str
    over: str | None = None

    def to_mql(self) -> str:
        text = f"PREDICTION {format_ident(self.target)}"
        if self.over:
            text += f" OVER {format_ident(self.over)}"
        return text


@dataclass(frozen=True)
class Classification:
    labels: tuple[Literal, ...]
    over: str | None = None

    def to_mql(self) -> str:
        text = "CLASSIFICATION INTO " + ", ".join(lb.to_mql() for lb in self.labels)
        if self.over:
            text += f" OVER {format_ident(self.over)}"
        return text


@dataclass(frozen=True)
class Cluster:
    k: IntExpr

    def to_mql(self) -> str:
        return f"CLUSTER OF {self.k.to_mql()}"


MlTask = Prediction | Classification | Cluster


@dataclass(frozen=True)
class UsingModel:
    name: str


@dataclass(frozen=True)
class UsingAlgorithm:
    name: str


Using = UsingModel | UsingAlgorithm


def _using_mql(using: Using) -> str:
    if isinstance(using, UsingModel):
        return f"USING MODEL {format_ident(using.name)}"
    # Canonical form drops the optional USING, matching written practice.
    return f"ALGORITHM {format_ident(using.name)}"


@dataclass(frozen=True)
class GenerateBody:
    display: bool
    task: MlTask
    using: Using | None
    accuracy: float | None
    label: tuple[str, ...]
    features: tuple[str, ...]
    from_tables: tuple[str, ...]
    where: Condition | None

    def to_mql(self) -> str:
        parts = ["GENERATE"]
        if self.display:
            parts.append("DISPLAY OF")
        parts.append(self.task.to_mql())
        parts.extend(self._tail_mql())
        return " ".join(parts)

    def _tail_mql(self) -> list[str]:
        parts: list[str] = []
        if self.using is not None:
            parts.append(_using_mql(self.using))
        if self.accuracy is not None:
            parts.append(f"WITH MODEL ACCURACY {format_decimal(self.accuracy)}")
        if self.label:
            parts.append("LABEL " + ", ".join(format_ident(c) for c in self.label))
        if self.features:
            parts.append("FEATURES " + ", ".join(format_ident(c) for c in self.features))
        parts.append("FROM " + ", ".join(format_ident(t) for t in self.from_tables))
        if self.where is not None:
            parts.append("WHERE " + self.where.to_mql())
        return parts


@dataclass(frozen=True)
class ConstructBody:
    model_name: str
    task: MlTask
    using: Using | None
    accuracy: float | None
    label: tuple[str, ...]
    features: tuple[str, ...]
    from_tables: tuple[str, ...]
    where: Condition | None

    def to_mql(self) -> str:
        body = GenerateBody(
            display=False, task=self.task, using=self.using, accuracy=self.accuracy,
            label=self.label, features=self.features,
            from_tables=self.from_tables, where=self.where,
        )
        tail = " ".join([self.task.to_mql()] + body._tail_mql())
        return f"CONSTRUCT MODEL {format_ident(self.model_name)} AS {tail}"


@dataclass(frozen=True)
class InspectDirective:
    # name: "dropnull" | "fillnull" | "dedupe"
    name: str
    column: str | None = None
    fill: Literal | None = None

    def to_mql(self) -> str:
        if self.name == "dedupe":
            return "dedupe()"
        if self.name == "dropnull":
            return f"dropnull({format_ident(self.column or '')})"
        return f"fillnull({format_ident(self.column or '')}, {self.fill.to_mql() if self.fill else ''})"


@dataclass(frozen=True)
class InspectBody:
    table: str
    directives: tuple[InspectDirective, ...]

    def to_mql(self) -> str:
        joined = ", ".join(d.to_mql() for d in self.directives)
        return f"INSPECT {format_ident(self.table)} APPLY {joined}"


Body = GenerateBody | ConstructBody | InspectBody


@dataclass(frozen=True)
class MqlStatement:
    # kind: "generate" | "construct" | "inspect"
    kind: str
    body: Body
    source_span: tuple[int, int] = field(default=(0, 0), compare=False)

    def to_mql(self) -> str:
        return self.body.to_mql() + ";"


def pretty(stmt: MqlStatement) -> str:
    """Canonical single-line rendering; reparses to an equal tree."""
    return stmt.to_mql()
