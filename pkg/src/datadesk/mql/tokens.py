"""MQL lexer: text -> token stream with source spans."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import LexError

KEYWORDS = {
    "GENERATE", "DISPLAY", "OF", "PREDICTION", "CLASSIFICATION", "INTO",
    "CLUSTER", "USING", "MODEL", "ALGORITHM", "WITH", "ACCURACY", "LABEL",
    "FEATURES", "FROM", "WHERE", "OVER", "AND", "OR", "NOT",
    "CONSTRUCT", "AS", "INSPECT", "APPLY",
    "COUNT", "DISTINCT", "MIN", "MAX", "AVG",
}

# Multi-character operators first so <= lexes as one token, not two.
OPERATORS = ["<=", ">=", "<>", "!=", "=", "<", ">", "(", ")", ",", ";", "+", "-", "*", "/"]


@dataclass(frozen=True)
class Token:
    kind: str          # keyword name, "IDENT", "QIDENT", "STRING", "INT", "DECIMAL", or the operator text
    text: str          # raw source text
    value: str | int | float | None  # decoded value for literals/identifiers
    start: int
    end: int

    @property
    def span(self) -> tuple[int, int]:
        return (self.start, self.end)


def _lex_quoted(text: str, pos: int, quote: str, what: str) -> tuple[str, int]:
    """Scan a quoted run starting at ``pos`` (on the opening quote).

    Doubled quotes escape themselves. Returns (decoded value, end offset past
    the closing quote); raises LexError if the input ends first.
    """
    i = pos + 1
    out: list[str] = []
    while i < len(text):
        ch = text[i]
        if ch == quote:
            if i + 1 < len(text) and text[i + 1] == quote:
                out.append(quote)
                i += 2
                continue
            return "".join(out), i + 1
        out.append(ch)
        i += 1
    raise LexError(f"unterminated {what}", (pos, len(text)))


def tokenize(text: str) -> list[Token]:
    """Tokenize MQL source text.

    Keywords are case-insensitive; identifiers keep their case. String
    literals are single-quoted with '' escaping; identifiers may be
    double-quoted to admit names like "district-tag".
    """
    tokens: list[Token] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch == "'":
            value, end = _lex_quoted(text, i, "'", "string literal")
            tokens.append(Token("STRING", text[i:end], value, i, end))
            i = end
            continue
        if ch == '"':
            value, end = _lex_quoted(text, i, '"', "quoted identifier")
            if not value:
                raise LexError("empty quoted identifier", (i, end))
            tokens.append(Token("QIDENT", text[i:end], value, i, end))
            i = end
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            if j < n and text[j] == "." and j + 1 < n and text[j + 1].isdigit():
                j += 1
                while j < n and text[j].isdigit():
                    j += 1
                tokens.append(Token("DECIMAL", text[i:j], float(text[i:j]), i, j))
            else:
                tokens.append(Token("INT", text[i:j], int(text[i:j]), i, j))
            i = j
            continue
        if ("a" <= ch <= "z") or ("A" <= ch <= "Z") or ch == "_":
            j = i
            while j < n and (text[j].isascii() and (text[j].isalnum() or text[j] == "_")):
                j += 1
            word = text[i:j]
            upper = word.upper()
            if upper in KEYWORDS:
                tokens.append(Token(upper, word, None, i, j))
            else:
                tokens.append(Token("IDENT", word, word, i, j))
            i = j
            continue
        for op in OPERATORS:
            if text.startswith(op, i):
                tokens.append(Token(op, op, None, i, i + len(op)))
                i += len(op)
                break
        else:
            raise LexError(f"illegal character {ch!r}", (i, i + 1))
    return tokens
