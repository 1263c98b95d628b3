"""Query-need translation: NL need + bound table -> executable plans.

Deterministic templates per intent: trend needs become aggregation plans
plus a chart directive, category needs become a clustering statement in MQL,
predict/classify needs become MQL statements over columns named in the text.
"""

from __future__ import annotations

from ..errors import SchemaGapError, UnmappableQuery
from ..mql.nodes import (
    Classification,
    Cluster,
    ColumnRef,
    Comparison,
    GenerateBody,
    IntLiteral,
    Literal,
    MqlStatement,
    Prediction,
    UsingAlgorithm,
)
from ..mql.parser import parse_statement
from ..mql.nodes import pretty
from ..store.aggregate import Aggregate, AggregationPlan, GroupKey, SortSpec
from ..store.table import Table
from ..store.values import Kind, is_numeric, is_temporal
from .intents import IntentRule, extract_k, match_intent, normalize
from .plans import AggPlan, BarChart, Choropleth, ClusterScatter, MqlPlan, QueryPlan, TrendLine, VizPlan


def _temporal_column(table: Table) -> str | None:
    for name, kind in table.schema:
        if is_temporal(kind):
            return name
    return None


def _named_int_column(table: Table, needle: str) -> str | None:
    for name, kind in table.schema:
        if kind is Kind.INT and needle in name.lower():
            return name
    return None


def _region_column(table: Table) -> str | None:
    for needle in ("district", "division", "region"):
        for name, kind in table.schema:
            if kind is Kind.TEXT and needle in name.lower():
                return name
    return None


_PROSE_NAMES = ("headline", "title", "text", "description", "summary", "body")


def _free_text_column(table: Table) -> str | None:
    """The prose column to cluster: a headline/title-named Text column if one
    exists, else the most-distinct Text column that is not a link column."""
    for name, kind in table.schema:
        if kind is Kind.TEXT and any(p in name.lower() for p in _PROSE_NAMES):
            return name
    best: tuple[int, str] | None = None
    for name, kind in table.schema:
        if kind is not Kind.TEXT:
            continue
        values = [str(v) for v in table.column(name) if v is not None]
        if not values:
            continue
        links = sum(v.startswith(("http://", "https://")) for v in values)
        if 2 * links > len(values):
            continue
        distinct = len(set(values))
        if best is None or distinct > best[0]:
            best = (distinct, name)
    return best[1] if best else None


def _total_filter(table: Table):
    """category = 'total' filter for long-form tables carrying a totals series."""
    for name, kind in table.schema:
        if kind is not Kind.TEXT:
            continue
        values = {str(v) for v in table.column(name) if v is not None}
        if "total" in values and len(values) <= 64:
            return Comparison("=", ColumnRef(name), Literal("string", "total"))
    return None


def _statement(body: GenerateBody) -> MqlStatement:
    # Round through the parser so the statement carries real source spans.
    return parse_statement(pretty(MqlStatement("generate", body)))


def _trend_plans(
    table: Table, grain: str, ordinal: int, base: int
) -> list[QueryPlan]:
    temporal = _temporal_column(table)
    if temporal is not None:
        key = GroupKey(temporal, grain)
        plan = AggregationPlan(
            source=table.name, group_by=(key,), aggregates=(Aggregate("count_star"),)
        )
        measure = "count"
    else:
        year_col = _named_int_column(table, "year")
        if year_col is None:
            raise SchemaGapError(
                f"table {table.name!r} has no date/timestamp column (nor a year column) "
                "to chart a trend over"
            )
        if grain == "month":
            raise SchemaGapError(
                f"table {table.name!r} only carries yearly data; a monthly trend needs timestamps"
            )
        count_col = _named_int_column(table, "count") or _named_int_column(table, "cases")
        aggregates = (Aggregate("sum", count_col),) if count_col else (Aggregate("count_star"),)
        measure = aggregates[0].output_name
        plan = AggregationPlan(
            source=table.name,
            where=_total_filter(table),
            group_by=(GroupKey(year_col),),
            aggregates=aggregates,
        )
        key = GroupKey(year_col)
    agg = AggPlan(plan, table.name, ordinal)
    if grain == "month":
        directive = TrendLine(key.output_name, measure)
    else:
        directive = BarChart(key.output_name, measure)
    return [agg, VizPlan(directive, base, table.name, ordinal)]


def translate(
    table: Table,
    kappa_q: str,
    *,
    rules: list[IntentRule],
    task_ordinal: int,
    geometry_ref: str | None = None,
    plan_base: int = 0,
) -> list[QueryPlan]:
    """Translate one query need against the most recent bound table.

    plan_base is the number of plans already queued this turn, so the viz
    directives can reference their input plan by queue index.
    """
    rule = match_intent(kappa_q, rules)
    if rule is None:
        raise UnmappableQuery(kappa_q)

    if rule.intent == "monthly_trend":
        return _trend_plans(table, "month", task_ordinal, plan_base)
    if rule.intent == "annual_trend":
        return _trend_plans(table, "year", task_ordinal, plan_base)

    if rule.intent == "hotspot":
        region = _region_column(table)
        if region is None:
            raise SchemaGapError(
                f"table {table.name!r} has no district/region column for a hotspot map"
            )
        plan = AggregationPlan(
            source=table.name,
            group_by=(GroupKey(region),),
            aggregates=(Aggregate("count_star"),),
            sort=SortSpec("count", descending=True),
        )
        return [
            AggPlan(plan, table.name, task_ordinal),
            VizPlan(
                Choropleth(region, "count", geometry_ref or ""),
                plan_base, table.name, task_ordinal,
            ),
        ]

    if rule.intent == "cluster":
        text_col = _free_text_column(table)
        if text_col is None:
            raise SchemaGapError(f"table {table.name!r} has no text column to cluster")
        k = extract_k(kappa_q, default=3)
        body = GenerateBody(
            display=True,
            task=Cluster(IntLiteral(k)),
            using=UsingAlgorithm("KMeans"),
            accuracy=None,
            label=(),
            features=(text_col,),
            from_tables=(table.name,),
            where=None,
        )
        return [
            MqlPlan(_statement(body), table.name, task_ordinal),
            VizPlan(ClusterScatter(), plan_base, table.name, task_ordinal),
        ]

    if rule.intent == "predict":
        words = set(normalize(kappa_q).split())
        target = next(
            (n for n, k in table.schema if is_numeric(k) and n.lower() in words), None
        )
        if target is None:
            raise SchemaGapError(
                "the query names no numeric column of "
                f"{table.name!r} to predict (columns: {', '.join(table.column_names)})"
            )
        features = tuple(
            n for n, k in table.schema
            if n != target and (is_numeric(k) or is_temporal(k))
        )
        if not features:
            raise SchemaGapError(f"table {table.name!r} has no numeric features to predict from")
        body = GenerateBody(
            display=False, task=Prediction(target), using=None, accuracy=None,
            label=(), features=features, from_tables=(table.name,), where=None,
        )
        return [MqlPlan(_statement(body), table.name, task_ordinal)]

    if rule.intent == "classify":
        labels = _labels_after_into(kappa_q)
        if len(labels) < 2:
            raise SchemaGapError(
                "a classification need must name at least two classes, e.g. "
                "'classify ... into urban, rural'"
            )
        feature_cols = tuple(
            n for n, k in table.schema
            if is_numeric(k) or (
                k is Kind.TEXT
                and len({v for v in table.column(n) if v is not None}) <= 64
            )
        )
        if not feature_cols:
            raise SchemaGapError(f"table {table.name!r} has no usable classification features")
        body = GenerateBody(
            display=False,
            task=Classification(tuple(Literal("string", l) for l in labels)),
            using=None, accuracy=None, label=(),
            features=feature_cols, from_tables=(table.name,), where=None,
        )
        return [MqlPlan(_statement(body), table.name, task_ordinal)]

    # lookup
    plan = AggregationPlan(source=table.name, aggregates=(Aggregate("count_star"),))
    return [AggPlan(plan, table.name, task_ordinal)]


def _labels_after_into(text: str) -> list[str]:
    lowered = text.lower()
    if " into " not in lowered:
        return []
    tail = text[lowered.index(" into ") + len(" into "):]
    parts = [p.strip(" .?!") for chunk in tail.split(" or ") for p in chunk.split(",")]
    labels: list[str] = []
    for p in parts:
        word = p.strip()
        if word and word.lower() not in ("and",):
            labels.append(word.split()[0])
    seen: list[str] = []
    for l in labels:
        if l not in seen:
            seen.append(l)
    return seen
