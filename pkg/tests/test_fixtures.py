"""Fixture generator: schema, determinism, sidecar consistency."""

import json

from datadesk.fixtures import PROTHOMALO_COLUMNS, generate_fixtures
from datadesk.store import ingest_csv
from datadesk.viz import load_geojson


def test_default_run_emits_8_column_report_file(tmp_path):
    paths = generate_fixtures(tmp_path, rows=50, seed=1)
    header = paths["prothomalo"].read_text(encoding="utf-8").splitlines()[0]
    assert header.split(",") == PROTHOMALO_COLUMNS
    assert len(PROTHOMALO_COLUMNS) == 8


def test_identical_bytes_for_same_rows_and_seed(tmp_path):
    first = generate_fixtures(tmp_path / "a", rows=120, seed=7)
    second = generate_fixtures(tmp_path / "b", rows=120, seed=7)
    for key in first:
        assert first[key].read_bytes() == second[key].read_bytes(), key
    third = generate_fixtures(tmp_path / "c", rows=120, seed=8)
    assert first["prothomalo"].read_bytes() != third["prothomalo"].read_bytes()


def test_sidecar_tallies_sum_to_row_count(tmp_path):
    paths = generate_fixtures(tmp_path, rows=211, seed=3)
    truth = json.loads(paths["ground_truth"].read_text())
    assert sum(truth["monthly"].values()) == 211
    assert sum(truth["districts"].values()) == 211
    assert len(truth["topics"]) == 211


def test_sidecar_matches_emitted_csv(tmp_path):
    paths = generate_fixtures(tmp_path, rows=90, seed=5)
    truth = json.loads(paths["ground_truth"].read_text())
    table = ingest_csv(paths["prothomalo"], name="ProthomAlo")
    months = {}
    for v in table.column("last-published-at"):
        months[str(v)[:7]] = months.get(str(v)[:7], 0) + 1
    assert months == {k: v for k, v in truth["monthly"].items() if v}
    districts = {}
    for v in table.column("district-tag"):
        districts[v] = districts.get(v, 0) + 1
    assert districts == {k: v for k, v in truth["districts"].items() if v}


def test_peak_month_is_planted_january_2020(tmp_path):
    truth = json.loads(generate_fixtures(tmp_path, rows=300, seed=42)["ground_truth"].read_text())
    monthly = truth["monthly"]
    peak = max(monthly.values())
    assert monthly["2020-01"] == peak
    assert sum(1 for v in monthly.values() if v == peak) == 1


def test_geometry_covers_every_district(tmp_path):
    paths = generate_fixtures(tmp_path, rows=40, seed=2)
    truth = json.loads(paths["ground_truth"].read_text())
    geometry = load_geojson(paths["geometry"], "district")
    assert set(geometry.regions) == set(truth["districts"])


def test_ngorep_long_form_with_totals_series(tmp_path):
    paths = generate_fixtures(tmp_path, rows=40, seed=2)
    table = ingest_csv(paths["ngorep"], name="NGORep")
    assert [n for n, _ in table.schema] == ["year", "category", "count"]
    truth = json.loads(paths["ground_truth"].read_text())
    totals = {
        str(y): c
        for y, cat, c in zip(table.column("year"), table.column("category"), table.column("count"))
        if cat == "total"
    }
    assert totals == truth["annual_total"]
