"""Recursive-descent parser for MQL statements.

The grammar is published in docs/grammar.ebnf; that file is the normative
contract this parser and its test corpus follow. Clause order is fixed:
task, [USING], [WITH MODEL ACCURACY], [LABEL], [FEATURES] FROM [WHERE].
"""

from __future__ import annotations

from ..errors import ParseError
from .nodes import (
    AggregateCall,
    AndCond,
    Classification,
    Cluster,
    ColumnRef,
    Comparison,
    Condition,
    ConstructBody,
    GenerateBody,
    InspectBody,
    InspectDirective,
    IntBinary,
    IntExpr,
    IntLiteral,
    Literal,
    MqlStatement,
    NotCond,
    OrCond,
    Prediction,
    UsingAlgorithm,
    UsingModel,
)
from .tokens import Token, tokenize

_COMPARE_OPS = {"=", "<", "<=", ">", ">="}
_INSPECT_DIRECTIVES = {"dropnull", "fillnull", "dedupe"}


class _Parser:
    def __init__(self, text: str, tokens: list[Token], base: int = 0):
        self.text = text
        self.tokens = tokens
        self.pos = 0
        self.base = base  # offset of tokens[0] in the original script text

    # -- token plumbing -----------------------------------------------------

    def peek(self, offset: int = 0) -> Token | None:
        idx = self.pos + offset
        return self.tokens[idx] if idx < len(self.tokens) else None

    def at(self, *kinds: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.kind in kinds

    def advance(self) -> Token:
        tok = self.peek()
        if tok is None:
            raise self.error("unexpected end of statement")
        self.pos += 1
        return tok

    def expect(self, kind: str, expected: str | None = None) -> Token:
        tok = self.peek()
        if tok is None or tok.kind != kind:
            raise self.error(
                f"expected {expected or kind}" + (f", found {tok.text!r}" if tok else ""),
                expected=expected or kind,
            )
        return self.advance()

    def error(self, message: str, expected: str | None = None) -> ParseError:
        tok = self.peek()
        if tok is not None:
            span = tok.span
        elif self.tokens:
            span = (self.tokens[-1].end, self.tokens[-1].end)
        else:
            span = (self.base, self.base)
        return ParseError(message, span, expected)

    # -- shared pieces ------------------------------------------------------

    def ident(self, what: str) -> str:
        tok = self.peek()
        if tok is not None and tok.kind in ("IDENT", "QIDENT"):
            self.advance()
            return str(tok.value)
        raise self.error(f"expected {what}", expected="identifier")

    def ident_list(self, what: str) -> tuple[str, ...]:
        names = [self.ident(what)]
        while self.at(","):
            self.advance()
            names.append(self.ident(what))
        return tuple(names)

    def literal(self) -> Literal:
        tok = self.peek()
        if tok is None:
            raise self.error("expected literal")
        if tok.kind == "INT":
            self.advance()
            return Literal("int", int(tok.value))  # type: ignore[arg-type]
        if tok.kind == "DECIMAL":
            self.advance()
            return Literal("decimal", float(tok.value))  # type: ignore[arg-type]
        if tok.kind == "STRING":
            self.advance()
            return Literal("string", str(tok.value))
        raise self.error(f"expected literal, found {tok.text!r}", expected="literal")

    # -- statements ----------------------------------------------------------

    def statement(self) -> MqlStatement:
        tok = self.peek()
        if tok is None:
            raise self.error("empty statement")
        start = tok.start
        if tok.kind == "GENERATE":
            body = self.generate_body()
            kind = "generate"
        elif tok.kind == "CONSTRUCT":
            body = self.construct_body()
            kind = "construct"
        elif tok.kind == "INSPECT":
            body = self.inspect_body()
            kind = "inspect"
        else:
            raise self.error(
                f"expected GENERATE, CONSTRUCT or INSPECT, found {tok.text!r}",
                expected="GENERATE",
            )
        if self.at(";"):
            end = self.advance().end
        elif self.peek() is None:
            end = self.tokens[-1].end
        else:
            raise self.error(f"unexpected {self.peek().text!r} after statement")
        return MqlStatement(kind, body, (start, end))

    def generate_body(self) -> GenerateBody:
        self.expect("GENERATE")
        display = False
        if self.at("DISPLAY"):
            self.advance()
            self.expect("OF", "OF after DISPLAY")
            display = True
        task = self.ml_task()
        using, accuracy, label, features, from_tables, where = self.common_clauses()
        if not features and not isinstance(using, UsingModel):
            raise ParseError(
                "FEATURES clause is required unless USING MODEL supplies a stored model",
                self._body_span(),
            )
        return GenerateBody(display, task, using, accuracy, label, features, from_tables, where)

    def construct_body(self) -> ConstructBody:
        self.expect("CONSTRUCT")
        self.expect("MODEL", "MODEL after CONSTRUCT")
        name = self.ident("model name")
        self.expect("AS", "AS")
        task = self.ml_task()
        if getattr(task, "over", None):
            raise ParseError("CONSTRUCT does not take an OVER clause", self._body_span())
        using, accuracy, label, features, from_tables, where = self.common_clauses()
        if isinstance(using, UsingModel):
            raise ParseError(
                "CONSTRUCT trains a new model; USING MODEL is not allowed here",
                self._body_span(),
            )
        if not features:
            raise ParseError("CONSTRUCT requires a FEATURES clause", self._body_span())
        return ConstructBody(name, task, using, accuracy, label, features, from_tables, where)

    def inspect_body(self) -> InspectBody:
        self.expect("INSPECT")
        table = self.ident("table name")
        self.expect("APPLY", "APPLY")
        directives = [self.inspect_directive()]
        while self.at(","):
            self.advance()
            directives.append(self.inspect_directive())
        return InspectBody(table, tuple(directives))

    def inspect_directive(self) -> InspectDirective:
        tok = self.peek()
        name = self.ident("directive name").lower()
        if name not in _INSPECT_DIRECTIVES:
            raise ParseError(
                f"unknown directive {name!r}; expected one of dropnull, fillnull, dedupe",
                tok.span if tok else None,
            )
        self.expect("(", "(")
        if name == "dedupe":
            self.expect(")", ")")
            return InspectDirective("dedupe")
        column = self.ident("column name")
        if name == "dropnull":
            self.expect(")", ")")
            return InspectDirective("dropnull", column)
        self.expect(",", ", before the fill value")
        fill = self.literal()
        self.expect(")", ")")
        return InspectDirective("fillnull", column, fill)

    # -- clauses --------------------------------------------------------------

    def ml_task(self):
        tok = self.peek()
        if tok is None:
            raise self.error("expected PREDICTION, CLASSIFICATION or CLUSTER")
        if tok.kind == "PREDICTION":
            self.advance()
            target = self.ident("target column")
            over = None
            if self.at("OVER"):
                self.advance()
                over = self.ident("test-set table name")
            return Prediction(target, over)
        if tok.kind == "CLASSIFICATION":
            self.advance()
            self.expect("INTO", "INTO")
            labels = [self.class_label()]
            while self.at(","):
                self.advance()
                labels.append(self.class_label())
            if len(set(labels)) < 2:
                raise ParseError(
                    "CLASSIFICATION needs at least 2 distinct labels", tok.span
                )
            over = None
            if self.at("OVER"):
                self.advance()
                over = self.ident("test-set table name")
            return Classification(tuple(labels), over)
        if tok.kind == "CLUSTER":
            self.advance()
            self.expect("OF", "OF after CLUSTER")
            k = self.int_expr()
            if self.at("OVER"):
                raise ParseError("CLUSTER does not take an OVER clause", self.peek().span)
            return Cluster(k)
        raise self.error(
            f"expected PREDICTION, CLASSIFICATION or CLUSTER, found {tok.text!r}",
            expected="PREDICTION",
        )

    def class_label(self) -> Literal:
        # Bare identifiers are accepted as shorthand for string labels.
        if self.at("IDENT", "QIDENT"):
            return Literal("string", self.ident("class label"))
        return self.literal()

    def common_clauses(self):
        using = None
        if self.at("USING"):
            self.advance()
            if self.at("MODEL"):
                self.advance()
                using = UsingModel(self.ident("model name"))
            elif self.at("ALGORITHM"):
                self.advance()
                using = UsingAlgorithm(self.ident("algorithm name"))
            else:
                raise self.error("expected MODEL or ALGORITHM after USING", expected="MODEL")
        elif self.at("ALGORITHM"):
            # USING is optional before ALGORITHM: "... ALGORITHM KMeans ..."
            self.advance()
            using = UsingAlgorithm(self.ident("algorithm name"))

        accuracy = None
        if self.at("WITH"):
            self.advance()
            self.expect("MODEL", "MODEL ACCURACY")
            self.expect("ACCURACY", "ACCURACY")
            tok = self.peek()
            lit = self.literal()
            if lit.kind not in ("decimal", "int") or not (0 < float(lit.value) < 1):
                raise ParseError(
                    f"ACCURACY threshold must lie strictly in (0,1), got {lit.to_mql()}",
                    tok.span if tok else None,
                )
            accuracy = float(lit.value)

        label: tuple[str, ...] = ()
        if self.at("LABEL"):
            self.advance()
            label = self.ident_list("label column")

        features: tuple[str, ...] = ()
        if self.at("FEATURES"):
            self.advance()
            features = self.ident_list("feature column")

        if not self.at("FROM"):
            raise self.error("FROM clause is required", expected="FROM")
        self.advance()
        from_tables = self.ident_list("table name")

        where = None
        if self.at("WHERE"):
            self.advance()
            where = self.condition()
        return using, accuracy, label, features, from_tables, where

    # -- conditions -------------------------------------------------------

    def condition(self) -> Condition:
        left = self.and_cond()
        while self.at("OR"):
            self.advance()
            left = OrCond(left, self.and_cond())
        return left

    def and_cond(self) -> Condition:
        left = self.not_cond()
        while self.at("AND"):
            self.advance()
            left = AndCond(left, self.not_cond())
        return left

    def not_cond(self) -> Condition:
        if self.at("NOT"):
            self.advance()
            return NotCond(self.not_cond())
        if self.at("("):
            self.advance()
            inner = self.condition()
            self.expect(")", ")")
            return inner
        return self.comparison()

    def comparison(self) -> Comparison:
        left = self.operand()
        tok = self.peek()
        if tok is None or (tok.kind not in _COMPARE_OPS and tok.kind not in ("<>", "!=")):
            raise self.error("expected a comparison operator", expected="=")
        self.advance()
        op = "<>" if tok.kind in ("<>", "!=") else tok.kind
        return Comparison(op, left, self.operand())

    def operand(self):
        if self.at("IDENT", "QIDENT"):
            return ColumnRef(self.ident("column"))
        return self.literal()

    # -- integer expressions ------------------------------------------------

    def int_expr(self) -> IntExpr:
        left = self.int_term()
        while self.at("+", "-"):
            op = self.advance().kind
            left = IntBinary(op, left, self.int_term())
        return left

    def int_term(self) -> IntExpr:
        left = self.int_factor()
        while self.at("*", "/"):
            op = self.advance().kind
            left = IntBinary(op, left, self.int_factor())
        return left

    def int_factor(self) -> IntExpr:
        tok = self.peek()
        if tok is None:
            raise self.error("expected an integer expression")
        if tok.kind == "INT":
            self.advance()
            return IntLiteral(int(tok.value))  # type: ignore[arg-type]
        if tok.kind == "(":
            self.advance()
            inner = self.int_expr()
            self.expect(")", ")")
            return inner
        if tok.kind in ("COUNT", "MIN", "MAX", "AVG"):
            self.advance()
            self.expect("(", "(")
            fn = tok.kind
            if fn == "COUNT" and self.at("DISTINCT"):
                self.advance()
                fn = "COUNT_DISTINCT"
            column = self.ident("aggregate column")
            self.expect(")", ")")
            return AggregateCall(fn, column)
        raise self.error(
            f"expected integer, aggregate or '(', found {tok.text!r}", expected="integer"
        )

    def _body_span(self) -> tuple[int, int]:
        start = self.tokens[0].start if self.tokens else self.base
        end = self.tokens[self.pos - 1].end if self.pos else start
        return (start, end)


def parse_statement(text: str) -> MqlStatement:
    """Parse a single MQL statement (trailing ';' optional)."""
    tokens = tokenize(text)
    if not tokens:
        raise ParseError("empty input", (0, 0))
    parser = _Parser(text, tokens)
    stmt = parser.statement()
    if parser.peek() is not None:
        raise parser.error(f"unexpected {parser.peek().text!r} after statement")
    return stmt


def parse_script(text: str) -> list[MqlStatement]:
    """Parse a ';'-separated script, all-or-nothing.

    The first error aborts with its position; a trailing ';' on the last
    statement is optional and whitespace-only input yields an empty list.
    """
    tokens = tokenize(text)
    statements: list[MqlStatement] = []
    start = 0
    while start < len(tokens):
        # Leading stray semicolons separate empty statements; skip them.
        if tokens[start].kind == ";":
            start += 1
            continue
        end = start
        while end < len(tokens) and tokens[end].kind != ";":
            end += 1
        chunk = tokens[start : end + 1 if end < len(tokens) else end]
        parser = _Parser(text, chunk, base=tokens[start].start)
        statements.append(parser.statement())
        start = end + 1
    return statements
