"""Tabular store: typed columnar tables, CSV ingest, filters, aggregation."""

from .aggregate import Aggregate, AggregationPlan, GroupKey, SortSpec, evaluate_int_expr, run_aggregation
from .filters import eval_filter
from .registry import DatasetDescriptor, Registry
from .table import Table, apply_inspect, ingest_csv
from .values import Kind, Value

__all__ = [
    "Aggregate", "AggregationPlan", "DatasetDescriptor", "GroupKey", "Kind",
    "Registry", "SortSpec", "Table", "Value",
    "apply_inspect", "eval_filter", "evaluate_int_expr", "ingest_csv",
    "run_aggregation",
]
