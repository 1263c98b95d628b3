"""Feature matrix construction: z-scored numerics, one-hot categoricals,
TF-IDF for free text. Encoders are fitted once and replay on unseen rows."""

from __future__ import annotations

import math
import unicodedata
from dataclasses import dataclass, field

import numpy as np

from ..errors import FeatureError
from ..store.table import Table
from ..store.values import epoch_days, is_numeric, is_temporal

# Distinct-value limit under which Text columns one-hot encode; above it, or
# when values are almost all unique (free text on small corpora), TF-IDF.
ONE_HOT_MAX = 64
_UNIQUE_RATIO = 0.9


def tokenize_text(text: str) -> list[str]:
    """Lowercased word tokens split on whitespace/punctuation.

    Word characters are Unicode letters, digits, combining marks and '_';
    including marks keeps Bangla words (which carry vowel signs) intact,
    which stdlib \\w would split apart.
    """
    tokens: list[str] = []
    current: list[str] = []
    for ch in text.lower():
        if ch == "_" or unicodedata.category(ch)[0] in ("L", "M", "N"):
            current.append(ch)
        elif current:
            tokens.append("".join(current))
            current = []
    if current:
        tokens.append("".join(current))
    return tokens


@dataclass
class NumericEncoder:
    column: str
    mean: float
    std: float  # population std; 0 marks a zero-variance column

    def width(self) -> int:
        return 1

    def provenance(self) -> list[tuple[str, str]]:
        return [(self.column, "numeric")]

    def transform(self, raw: list[float | None]) -> np.ndarray:
        out = np.empty((len(raw), 1))
        for i, v in enumerate(raw):
            x = self.mean if v is None else float(v)
            out[i, 0] = 0.0 if self.std == 0.0 else (x - self.mean) / self.std
        return out


@dataclass
class OneHotEncoder:
    column: str
    vocab: list[str]  # sorted distinct training values

    def width(self) -> int:
        return len(self.vocab)

    def provenance(self) -> list[tuple[str, str]]:
        return [(self.column, f"one-hot({v})") for v in self.vocab]

    def transform(self, raw: list[str | None]) -> np.ndarray:
        index = {v: j for j, v in enumerate(self.vocab)}
        out = np.zeros((len(raw), len(self.vocab)))
        for i, v in enumerate(raw):
            j = index.get(v if v is None else str(v))
            if j is not None:
                out[i, j] = 1.0  # unseen categories and Nulls stay all-zero
        return out


@dataclass
class TfidfEncoder:
    column: str
    vocab: list[str]           # sorted terms kept by the frequency floor
    idf: list[float]           # aligned with vocab

    def width(self) -> int:
        return len(self.vocab)

    def provenance(self) -> list[tuple[str, str]]:
        return [(self.column, f"tfidf({t})") for t in self.vocab]

    def transform(self, raw: list[str | None]) -> np.ndarray:
        index = {t: j for j, t in enumerate(self.vocab)}
        out = np.zeros((len(raw), len(self.vocab)))
        for i, text in enumerate(raw):
            if text is None:
                continue
            for token in tokenize_text(str(text)):
                j = index.get(token)
                if j is not None:
                    out[i, j] += 1.0
        out *= np.asarray(self.idf)
        norms = np.sqrt((out * out).sum(axis=1))
        nonzero = norms > 0
        out[nonzero] /= norms[nonzero, None]
        return out


ColumnEncoder = NumericEncoder | OneHotEncoder | TfidfEncoder


@dataclass
class FittedEncoder:
    """Per-column encoder states, in feature-clause order."""

    encoders: list[ColumnEncoder] = field(default_factory=list)

    @property
    def columns(self) -> list[str]:
        return [e.column for e in self.encoders]


@dataclass
class FeatureMatrix:
    data: np.ndarray  # dense float64, no NaN/Inf
    provenance: list[tuple[str, str]]

    @property
    def n_rows(self) -> int:
        return int(self.data.shape[0])

    @property
    def n_cols(self) -> int:
        return int(self.data.shape[1])


def _numeric_raw(table: Table, column: str) -> list[float | None]:
    kind = table.kind_of(column)
    cells = table.column(column)
    if is_temporal(kind):
        return [None if v is None else epoch_days(str(v)) for v in cells]
    return [None if v is None else float(v) for v in cells]


def _fit_column(table: Table, column: str) -> ColumnEncoder:
    kind = table.kind_of(column)
    cells = table.column(column)
    present = [v for v in cells if v is not None]
    if not present:
        raise FeatureError(f"feature column {column!r} is entirely Null")
    if is_numeric(kind) or is_temporal(kind):
        raw = [v for v in _numeric_raw(table, column) if v is not None]
        mean = float(np.mean(raw))
        std = float(np.std(raw))  # population std (ddof=0)
        return NumericEncoder(column, mean, std)
    distinct = sorted({str(v) for v in present})
    if len(distinct) <= ONE_HOT_MAX and len(distinct) < _UNIQUE_RATIO * len(present):
        return OneHotEncoder(column, distinct)
    # Free text: TF-IDF with idf = ln((1+N)/(1+df)) + 1 and a collection
    # frequency floor of 2 (hapax terms are dropped).
    docs = [tokenize_text(str(v)) if v is not None else [] for v in cells]
    total: dict[str, int] = {}
    df: dict[str, int] = {}
    for tokens in docs:
        for t in tokens:
            total[t] = total.get(t, 0) + 1
        for t in set(tokens):
            df[t] = df.get(t, 0) + 1
    vocab = sorted(t for t, n in total.items() if n >= 2)
    n_docs = len(docs)
    idf = [math.log((1 + n_docs) / (1 + df[t])) + 1.0 for t in vocab]
    return TfidfEncoder(column, vocab, idf)


def _transform_column(encoder: ColumnEncoder, table: Table) -> np.ndarray:
    if isinstance(encoder, NumericEncoder):
        kind = table.kind_of(encoder.column)
        if not (is_numeric(kind) or is_temporal(kind)):
            raise FeatureError(
                f"column {encoder.column!r} is {kind.value}, but the encoder expects a numeric"
            )
        return encoder.transform(_numeric_raw(table, encoder.column))
    cells = table.column(encoder.column)
    return encoder.transform([None if v is None else str(v) for v in cells])


def build_features(
    table: Table,
    feature_cols: list[str],
    encoder: FittedEncoder | None = None,
) -> tuple[FeatureMatrix, FittedEncoder]:
    """Encode the given columns into a dense matrix.

    With no fitted encoder, one is fitted on this table (training); with one
    supplied, its state replays so unseen categories map to all-zeros.
    """
    if table.row_count == 0:
        raise FeatureError("cannot build features from an empty table")
    if not feature_cols:
        raise FeatureError("no feature columns given")
    if encoder is None:
        encoder = FittedEncoder([_fit_column(table, c) for c in feature_cols])
    blocks = [_transform_column(e, table) for e in encoder.encoders]
    data = np.hstack(blocks) if blocks else np.zeros((table.row_count, 0))
    if data.shape[1] == 0:
        raise FeatureError(
            "no usable features: every encoded column is empty "
            "(text columns need terms occurring at least twice)"
        )
    if not np.isfinite(data).all():
        raise FeatureError("feature matrix contains non-finite values")
    provenance = [p for e in encoder.encoders for p in e.provenance()]
    return FeatureMatrix(data, provenance), encoder
