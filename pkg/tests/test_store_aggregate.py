"""Aggregation plans and CLUSTER OF integer expressions vs tally oracles."""

import pytest

from datadesk.errors import BindError, EvalError
from datadesk.mql import parse_statement
from datadesk.store import (
    Aggregate,
    AggregationPlan,
    GroupKey,
    Kind,
    SortSpec,
    Table,
    evaluate_int_expr,
    ingest_csv,
    run_aggregation,
)

from oracles import monthly_tally, tally


def _k_expr(text: str):
    return parse_statement(f"GENERATE CLUSTER OF {text} FEATURES h FROM t;").body.task.k


@pytest.fixture(scope="module")
def reports(fx300):
    return ingest_csv(fx300["prothomalo"], name="ProthomAlo")


@pytest.fixture()
def ten_rows():
    stamps = [
        "2020-01-05T10:00:00", "2020-01-09T11:00:00", "2020-01-20T12:00:00",
        "2020-02-01T08:00:00", "2020-02-02T09:30:00",
        "2020-03-10T10:00:00", "2020-03-11T10:00:00", "2020-03-12T10:00:00",
        "2020-03-13T10:00:00", "2020-03-14T10:00:00",
    ]
    return Table("ten", [("ts", Kind.TIMESTAMP)], [stamps])


class TestRunAggregation:
    def test_monthly_tally_matches_hand_enumeration(self, ten_rows):
        plan = AggregationPlan(source="ten", group_by=(GroupKey("ts", "month"),))
        out = run_aggregation(plan, ten_rows)
        assert out.rows() == [("2020-01", 3), ("2020-02", 2), ("2020-03", 5)]

    def test_monthly_tally_on_fixture_matches_oracle(self, reports, ground_truth_300):
        plan = AggregationPlan(source="ProthomAlo", group_by=(GroupKey("last-published-at", "month"),))
        out = run_aggregation(plan, reports)
        got = dict(zip(out.column("month"), out.column("count")))
        oracle = monthly_tally(reports, "last-published-at")
        assert got == dict(oracle)
        assert got == {k: v for k, v in ground_truth_300["monthly"].items() if v > 0}

    def test_count_star_empty_table(self):
        empty = Table("e", [("x", Kind.INT)], [[]])
        out = run_aggregation(AggregationPlan(source="e"), empty)
        assert out.rows() == [(0,)]

    def test_group_by_district_sorted_desc(self, reports, ground_truth_300):
        plan = AggregationPlan(
            source="ProthomAlo",
            group_by=(GroupKey("district-tag"),),
            aggregates=(Aggregate("count_star"),),
            sort=SortSpec("count", descending=True),
        )
        out = run_aggregation(plan, reports)
        oracle = tally(reports.column("district-tag"))
        assert dict(zip(out.column("district-tag"), out.column("count"))) == dict(oracle)
        counts = out.column("count")
        assert counts == sorted(counts, reverse=True)
        assert out.column("district-tag")[0] == max(oracle, key=lambda d: oracle[d])
        assert dict(oracle) == ground_truth_300["districts"]

    def test_count_star_equals_row_count_without_filter(self, reports, fx300):
        for table in (reports, ingest_csv(fx300["ngorep"], name="NGORep")):
            out = run_aggregation(AggregationPlan(source=table.name), table)
            assert out.rows() == [(table.row_count,)]

    def test_where_filter_applies_before_grouping(self, ten_rows):
        cond = parse_statement(
            "GENERATE CLUSTER OF 1 FEATURES h FROM t WHERE ts >= '2020-03-01';"
        ).body.where
        plan = AggregationPlan(source="ten", where=cond, group_by=(GroupKey("ts", "month"),))
        assert run_aggregation(plan, ten_rows).rows() == [("2020-03", 5)]

    def test_sum_min_max_avg(self):
        table = Table("t", [("g", Kind.TEXT), ("v", Kind.INT)],
                      [["a", "a", "b"], [1, 3, 10]])
        plan = AggregationPlan(
            source="t",
            group_by=(GroupKey("g"),),
            aggregates=(
                Aggregate("sum", "v"), Aggregate("min", "v"),
                Aggregate("max", "v"), Aggregate("avg", "v"),
                Aggregate("count", "v"), Aggregate("count_distinct", "v"),
            ),
        )
        out = run_aggregation(plan, table)
        assert out.rows() == [("a", 4, 1, 3, 2.0, 2, 2), ("b", 10, 10, 10, 10.0, 1, 1)]

    def test_avg_over_text_is_an_error(self):
        table = Table("t", [("s", Kind.TEXT)], [["x"]])
        plan = AggregationPlan(source="t", aggregates=(Aggregate("avg", "s"),))
        with pytest.raises(EvalError, match="non-numeric"):
            run_aggregation(plan, table)

    def test_derived_key_requires_temporal(self):
        table = Table("t", [("x", Kind.INT)], [[1]])
        plan = AggregationPlan(source="t", group_by=(GroupKey("x", "month"),))
        with pytest.raises(BindError, match="month"):
            run_aggregation(plan, table)

    def test_year_key_is_integer(self, ten_rows):
        plan = AggregationPlan(source="ten", group_by=(GroupKey("ts", "year"),))
        out = run_aggregation(plan, ten_rows)
        assert out.rows() == [(2020, 10)]
        assert out.kind_of("year") is Kind.INT

    def test_sort_and_limit(self, reports):
        plan = AggregationPlan(
            source="ProthomAlo",
            group_by=(GroupKey("district-tag"),),
            aggregates=(Aggregate("count_star"),),
            sort=SortSpec("count", descending=True),
            limit=3,
        )
        out = run_aggregation(plan, reports)
        assert out.row_count == 3
        full = run_aggregation(
            AggregationPlan(
                source="ProthomAlo",
                group_by=(GroupKey("district-tag"),),
                aggregates=(Aggregate("count_star"),),
                sort=SortSpec("count", descending=True),
            ),
            reports,
        )
        assert out.rows() == full.rows()[:3]


class TestEvaluateIntExpr:
    def test_literal(self, reports):
        assert evaluate_int_expr(_k_expr("3"), [reports]) == 3

    def test_count_distinct_divisions_is_4(self, reports):
        assert evaluate_int_expr(_k_expr('COUNT(DISTINCT "division-tag")'), [reports]) == 4

    def test_division_by_zero(self, reports):
        with pytest.raises(EvalError, match="division by zero"):
            evaluate_int_expr(_k_expr("6 / 0"), [reports])

    def test_floor_division_and_precedence(self, reports):
        assert evaluate_int_expr(_k_expr("7 / 2"), [reports]) == 3
        assert evaluate_int_expr(_k_expr("1 + 2 * 3"), [reports]) == 7
        assert evaluate_int_expr(_k_expr("(1 + 2) * 3"), [reports]) == 9

    def test_aggregates_and_avg_floor(self):
        table = Table("t", [("v", Kind.INT)], [[1, 2, 4]])
        assert evaluate_int_expr(_k_expr("COUNT(v)"), [table]) == 3
        assert evaluate_int_expr(_k_expr("MIN(v)"), [table]) == 1
        assert evaluate_int_expr(_k_expr("MAX(v)"), [table]) == 4
        assert evaluate_int_expr(_k_expr("AVG(v)"), [table]) == 2  # 7/3 floors

    def test_unbound_column(self, reports):
        with pytest.raises(BindError, match="nope"):
            evaluate_int_expr(_k_expr("COUNT(nope)"), [reports])

    def test_count_skips_nulls(self):
        table = Table("t", [("v", Kind.INT)], [[1, None, 2]])
        assert evaluate_int_expr(_k_expr("COUNT(v)"), [table]) == 2
