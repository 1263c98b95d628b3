"""Executable plan language: MQL statements, aggregation plans and
visualization directives, each tagged with its originating task ordinal."""

from __future__ import annotations

from dataclasses import dataclass

from ..mql.nodes import MqlStatement
from ..store.aggregate import AggregationPlan


@dataclass(frozen=True)
class TrendLine:
    time_key: str           # output column of the input plan ("month" | "year")
    measure: str            # output column holding the counted/summed values


@dataclass(frozen=True)
class Choropleth:
    region_key: str
    measure: str
    geometry_ref: str       # path to the GeoJSON the session is configured with


@dataclass(frozen=True)
class ClusterScatter:
    pass  # projects the clustering's own feature matrix


@dataclass(frozen=True)
class BarChart:
    category_key: str
    measure: str


VizDirective = TrendLine | Choropleth | ClusterScatter | BarChart


@dataclass(frozen=True)
class MqlPlan:
    statement: MqlStatement
    table: str
    task_ordinal: int


@dataclass(frozen=True)
class AggPlan:
    plan: AggregationPlan
    table: str
    task_ordinal: int


@dataclass(frozen=True)
class VizPlan:
    directive: VizDirective
    input_index: int        # index of the plan whose result this renders
    table: str
    task_ordinal: int


QueryPlan = MqlPlan | AggPlan | VizPlan


def describe_plan(plan: QueryPlan) -> str:
    """One-line rendering for transcripts and diagnostics."""
    if isinstance(plan, MqlPlan):
        return plan.statement.to_mql()
    if isinstance(plan, AggPlan):
        p = plan.plan
        keys = ", ".join(
            f"{k.derive}({k.column})" if k.derive else k.column for k in p.group_by
        ) or "(none)"
        aggs = ", ".join(a.output_name for a in p.aggregates)
        text = f"aggregate {plan.table}: group by {keys}; compute {aggs}"
        if p.where is not None:
            text += f"; where {p.where.to_mql()}"
        if p.sort is not None:
            text += f"; sort {p.sort.by}{' desc' if p.sort.descending else ''}"
        return text
    kind = type(plan.directive).__name__
    return f"render {kind} from plan #{plan.input_index + 1}"
