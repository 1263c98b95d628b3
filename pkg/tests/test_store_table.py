"""CSV ingestion, kind inference, registry and INSPECT cleaning."""

import json

import pytest

from datadesk.errors import EvalError, IngestError, RegistryError
from datadesk.mql import parse_statement
from datadesk.store import Kind, Registry, Table, apply_inspect, ingest_csv
from datadesk.store.values import infer_kind, parse_timestamp


class TestInference:
    def test_priority_order(self):
        assert infer_kind(["1", "2", "3"]) is Kind.INT
        assert infer_kind(["1", "2.5"]) is Kind.DECIMAL
        assert infer_kind(["2020-01-01", "2021-12-31"]) is Kind.DATE
        assert infer_kind(["2020-01-01T10:00:00", "2020-01-02"]) is Kind.TIMESTAMP
        assert infer_kind(["1", "2", "x"]) is Kind.TEXT

    def test_empty_cells_ignored_for_inference(self):
        assert infer_kind(["", "4", ""]) is Kind.INT
        assert infer_kind(["", "", ""]) is Kind.TEXT

    def test_timestamp_normalization(self):
        assert parse_timestamp("2020-01-05") == "2020-01-05T00:00:00"
        assert parse_timestamp("2020-01-05 10:11:12") == "2020-01-05T10:11:12"
        assert parse_timestamp("2020-13-05") is None


class TestIngest:
    def test_fixture_has_8_columns(self, fx300):
        table = ingest_csv(fx300["prothomalo"], name="ProthomAlo")
        assert [n for n, _ in table.schema] == [
            "ID", "URL", "headline", "district-tag", "division-tag",
            "subdistrict-tag", "last-published-at", "offset",
        ]
        assert table.kind_of("last-published-at") is Kind.TIMESTAMP
        assert table.kind_of("offset") is Kind.INT
        assert table.row_count == 300

    def test_header_only_file(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("a,b,c\n", encoding="utf-8")
        table = ingest_csv(path)
        assert table.row_count == 0
        assert len(table.schema) == 3

    def test_mixed_column_falls_through_to_text(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("v\n1\n2\nx\n", encoding="utf-8")
        assert ingest_csv(path).kind_of("v") is Kind.TEXT

    def test_ragged_row_error_names_row(self, tmp_path):
        path = tmp_path / "r.csv"
        path.write_text("a,b\n1,2\n3\n", encoding="utf-8")
        with pytest.raises(IngestError, match="row 2"):
            ingest_csv(path)

    def test_declared_schema_coercion_failure_names_cell(self, tmp_path):
        path = tmp_path / "c.csv"
        path.write_text("a\n1\nnope\n", encoding="utf-8")
        with pytest.raises(IngestError, match=r"row 2, column 'a'"):
            ingest_csv(path, declared_schema={"a": Kind.INT})

    def test_empty_cells_become_null(self, tmp_path):
        path = tmp_path / "n.csv"
        path.write_text("a,b\n1,\n,x\n", encoding="utf-8")
        table = ingest_csv(path)
        assert table.column("a") == [1, None]
        assert table.column("b") == [None, "x"]

    def test_deterministic_same_bytes_equal_table(self, fx300):
        first = ingest_csv(fx300["prothomalo"])
        second = ingest_csv(fx300["prothomalo"])
        assert first.equals(second)


class TestRegistry:
    def _table(self, name="demo"):
        return Table(name, [("x", Kind.INT)], [[1, 2, 3]])

    def test_register_and_reload(self, tmp_path, fx300):
        manifest = tmp_path / "manifest.json"
        registry = Registry(manifest)
        table = ingest_csv(fx300["prothomalo"], name="ProthomAlo")
        descriptor = registry.register(table, "incident reports", fx300["prothomalo"])
        assert descriptor.name == "ProthomAlo"
        entries = json.loads(manifest.read_text())
        assert entries[0]["name"] == "ProthomAlo"
        # A fresh registry lazily reloads the table from its CSV.
        reloaded = Registry(manifest)
        assert reloaded.table("ProthomAlo").row_count == 300

    def test_duplicate_name_rejected(self, tmp_path):
        registry = Registry(tmp_path / "m.json")
        registry.register(self._table(), "numbers", "demo.csv")
        with pytest.raises(RegistryError, match="already registered"):
            registry.register(self._table(), "numbers again", "demo.csv")

    def test_empty_description_rejected(self, tmp_path):
        registry = Registry(tmp_path / "m.json")
        with pytest.raises(RegistryError, match="non-empty"):
            registry.register(self._table(), "   ", "demo.csv")


class TestInspect:
    def _directives(self, text):
        return list(parse_statement(f"INSPECT t APPLY {text};").body.directives)

    def test_dropnull_counts(self):
        table = Table("t", [("x", Kind.INT)], [[1, None, 3, None, 5, 6, 7, 8, 9, 10]])
        out = apply_inspect(table, self._directives("dropnull(x)"))
        assert out.row_count == 8

    def test_dedupe_identity_on_distinct_rows(self):
        table = Table("t", [("x", Kind.INT)], [[1, 2, 3]])
        out = apply_inspect(table, self._directives("dedupe()"))
        assert out.equals(table)

    def test_dedupe_keeps_first(self):
        table = Table("t", [("x", Kind.INT), ("y", Kind.TEXT)], [[1, 1, 2], ["a", "a", "b"]])
        out = apply_inspect(table, self._directives("dedupe()"))
        assert out.rows() == [(1, "a"), (2, "b")]

    def test_fillnull_then_dropnull_preserves_rows(self):
        table = Table("t", [("offset", Kind.INT)], [[1, None, 3]])
        out = apply_inspect(table, self._directives("fillnull(offset, 0), dropnull(offset)"))
        assert out.row_count == table.row_count
        assert out.column("offset") == [1, 0, 3]

    def test_fillnull_kind_mismatch(self):
        table = Table("t", [("offset", Kind.INT)], [[1, None]])
        with pytest.raises(EvalError):
            apply_inspect(table, self._directives("fillnull(offset, 'zero')"))

    def test_input_never_mutated(self):
        table = Table("t", [("x", Kind.INT)], [[1, None, 3]])
        before_schema = list(table.schema)
        before_cols = [list(c) for c in table.columns]
        apply_inspect(table, self._directives("fillnull(x, 9), dedupe(), dropnull(x)"))
        assert table.schema == before_schema
        assert table.columns == before_cols
