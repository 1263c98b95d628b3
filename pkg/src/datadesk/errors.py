"""Exception types shared across the package.

Every error that can carry a source location exposes ``span``, a
``(start, end)`` pair of character offsets into the originating MQL text.
Errors raised outside statement execution leave ``span`` as ``None``.
"""

from __future__ import annotations


class DatadeskError(Exception):
    """Base class for all errors raised by this package."""

    def __init__(self, message: str, span: tuple[int, int] | None = None):
        super().__init__(message)
        self.message = message
        self.span = span


class LexError(DatadeskError):
    """Illegal character or unterminated literal while tokenizing."""


class ParseError(DatadeskError):
    """Syntactically or structurally invalid MQL statement."""

    def __init__(
        self,
        message: str,
        span: tuple[int, int] | None = None,
        expected: str | None = None,
    ):
        super().__init__(message, span)
        self.expected = expected


class IngestError(DatadeskError):
    """CSV could not be ingested (ragged row, coercion failure)."""


class RegistryError(DatadeskError):
    """Dataset registration violated a registry invariant."""


class BindError(DatadeskError):
    """A name (column, table) did not resolve against the bound schema."""


class EvalError(DatadeskError):
    """Evaluation failed (division by zero, aggregate over wrong kind)."""


class FeatureError(DatadeskError):
    """Feature matrix could not be built from the given columns."""


class MlError(DatadeskError):
    """An ML task's preconditions failed (bad k, unknown algorithm, labels)."""


class SchemaError(DatadeskError):
    """A table lacked columns a model or plan requires."""


class AccuracyError(DatadeskError):
    """A trained model fell short of the requested accuracy threshold."""

    def __init__(self, accuracy: float, threshold: float, span: tuple[int, int] | None = None):
        super().__init__(
            f"model accuracy {accuracy:.4f} is below the requested threshold {threshold:.4f}",
            span,
        )
        self.accuracy = accuracy
        self.threshold = threshold


class ModelNotFound(DatadeskError):
    """No stored model exists under the requested name."""


class VizError(DatadeskError):
    """A renderer was handed input it cannot plot (e.g. empty series)."""


class UnmappableQuery(DatadeskError):
    """No intent rule fired for a natural-language query."""

    def __init__(self, query: str):
        super().__init__(f"no intent rule matches the query: {query!r}")
        self.query = query


class AgentError(DatadeskError):
    """An external agent adapter failed (transport, malformed response)."""


class NoDatasetMatch(DatadeskError):
    """No registered dataset description scored above the match floor."""

    def __init__(self, need: str, candidates: list[tuple[str, float]]):
        listed = ", ".join(f"{name} ({score:.3f})" for name, score in candidates) or "none"
        super().__init__(f"no dataset matches {need!r}; best candidates: {listed}")
        self.need = need
        self.candidates = candidates


class OrderingError(DatadeskError):
    """A query task appeared before any data task bound a table."""


class SchemaGapError(DatadeskError):
    """The bound table lacks the column kind an intent requires."""
