"""Synthetic fixture datasets with ground-truth sidecars.

Real newsroom snapshots are third-party and not redistributable, so the
fixture generator is part of the product: it emits a news-report-shaped
table (ProthomAlo), a yearly NGO-counts table (NGORep), toy district
geometry, a dataset manifest, and a ground_truth.json sidecar holding the
planted monthly tallies, district counts, topic labels and annual totals
that tests and acceptance checks use as oracles. Output is byte-identical
per (rows, seed).
"""

from __future__ import annotations

import csv
import json
import math
import random
from pathlib import Path

PROTHOMALO_COLUMNS = [
    "ID", "URL", "headline", "district-tag", "division-tag",
    "subdistrict-tag", "last-published-at", "offset",
]

# district -> division; 12 districts across 4 divisions.
DISTRICTS: dict[str, str] = {
    "Dhaka": "Dhaka",
    "Gazipur": "Dhaka",
    "Narayanganj": "Dhaka",
    "Chattogram": "Chattogram",
    "Cumilla": "Chattogram",
    "Coxs Bazar": "Chattogram",
    "Khulna": "Khulna",
    "Jashore": "Khulna",
    "Satkhira": "Khulna",
    "Rajshahi": "Rajshahi",
    "Bogura": "Rajshahi",
    "Pabna": "Rajshahi",
}

# Three disjoint headline vocabularies; a couple of Bangla tokens keep the
# Unicode tokenization path honest.
TOPIC_POOLS = [
    ["court", "verdict", "trial", "sentence", "appeal", "tribunal", "hearing", "আদালত"],
    ["police", "arrest", "suspect", "detained", "custody", "investigation", "charge", "পুলিশ"],
    ["protest", "rally", "demand", "activists", "march", "students", "strike", "প্রতিবাদ"],
]
TOPIC_WEIGHTS = [0.4, 0.35, 0.25]

MONTHS = [f"{y}-{m:02d}" for y in (2018, 2019, 2020) for m in range(1, 13)]

NGO_CATEGORIES = ["attempt", "suicide", "gang", "homicide", "total"]
NGO_YEARS = list(range(2001, 2022))

PROTHOMALO_DESCRIPTION = (
    "Snapshot of rape incident reports published by the Prothom Alo daily "
    "newspaper. One row per report with headline text, district, division "
    "and subdistrict location tags, last-published report dates and a page "
    "offset. Suits monthly trend charts over report dates, district hotspot "
    "maps and clustering of headlines."
)

NGOREP_DESCRIPTION = (
    "Annual totals of rape incidents by year, compiled from NGO yearly "
    "publications covering 2001 through 2021. One row per year and category "
    "(attempt, suicide, gang, homicide, total) with the recorded count. "
    "Suits year-over-year and annual totals questions."
)


def _month_weight(month_key: str) -> float:
    """Planted seasonality: a January spike on top of a winter peak plus a
    rising year-on-year drift make 2020-01 the strict busiest month."""
    year = int(month_key[:4])
    month = int(month_key[5:7])
    seasonal = 3.0 * math.cos(2.0 * math.pi * (month - 1) / 12.0)
    spike = 3.0 if month == 1 else 0.0
    drift = 2.5 * (year - 2018)
    return 10.0 + seasonal + spike + drift


def _district_weights() -> list[float]:
    return [1.0 / (i + 1) for i in range(len(DISTRICTS))]


def _apportion(total: int, weights: list[float]) -> list[int]:
    """Largest-remainder apportionment: exact counts proportional to weights,
    so the planted peak is the heaviest weight at every fixture size."""
    scale = total / sum(weights)
    quotas = [w * scale for w in weights]
    counts = [math.floor(q) for q in quotas]
    remainder = total - sum(counts)
    by_fraction = sorted(range(len(weights)), key=lambda i: (-(quotas[i] - counts[i]), i))
    for i in by_fraction[:remainder]:
        counts[i] += 1
    return counts


def generate_fixtures(out_dir: str | Path, rows: int = 300, seed: int = 42) -> dict[str, Path]:
    """Write the fixture files into out_dir and return their paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(seed)

    districts = list(DISTRICTS)

    month_counts = _apportion(rows, [_month_weight(m) for m in MONTHS])
    district_counts = _apportion(rows, _district_weights())
    month_slots = [m for m, c in zip(MONTHS, month_counts) for _ in range(c)]
    district_slots = [d for d, c in zip(districts, district_counts) for _ in range(c)]
    rng.shuffle(month_slots)
    rng.shuffle(district_slots)

    monthly = {m: c for m, c in zip(MONTHS, month_counts)}
    per_district = {d: c for d, c in zip(districts, district_counts)}
    topics: list[int] = []

    report_rows: list[list[str]] = []
    for i in range(1, rows + 1):
        month_key = month_slots[i - 1]
        day = rng.randint(1, 28)
        stamp = (
            f"{month_key}-{day:02d}T"
            f"{rng.randint(0, 23):02d}:{rng.randint(0, 59):02d}:{rng.randint(0, 59):02d}"
        )
        district = district_slots[i - 1]
        topic = rng.choices(range(3), weights=TOPIC_WEIGHTS, k=1)[0]
        words = rng.sample(TOPIC_POOLS[topic], 4)
        headline = " ".join(words) + f" in {district}"
        offset = "" if rng.random() < 0.05 else str(rng.randint(0, 20))
        report_rows.append([
            str(i),
            f"https://example.org/news/{i}",
            headline,
            district,
            DISTRICTS[district],
            f"{district} Sadar",
            stamp,
            offset,
        ])
        topics.append(topic)

    prothomalo_path = out / "prothomalo.csv"
    with open(prothomalo_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(PROTHOMALO_COLUMNS)
        writer.writerows(report_rows)

    # NGORep: overlapping yearly sub-series plus an independent totals series.
    annual_total: dict[str, int] = {}
    ngo_rows: list[list[str]] = []
    for year in NGO_YEARS:
        total = 300 + 25 * (year - 2001) + rng.randint(-30, 30)
        shares = {"attempt": 0.30, "suicide": 0.08, "gang": 0.18, "homicide": 0.05}
        for category in NGO_CATEGORIES:
            if category == "total":
                count = total
            else:
                count = int(total * shares[category]) + rng.randint(-10, 10)
                count = max(count, 0)
            ngo_rows.append([str(year), category, str(count)])
        annual_total[str(year)] = total

    ngorep_path = out / "ngorep.csv"
    with open(ngorep_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["year", "category", "count"])
        writer.writerows(ngo_rows)

    geojson_path = out / "districts.geojson"
    geojson_path.write_text(json.dumps(_district_geometry(), indent=2) + "\n", encoding="utf-8")

    manifest_path = out / "manifest.json"
    manifest_path.write_text(
        json.dumps(
            [
                {
                    "name": "ProthomAlo",
                    "csv_path": "prothomalo.csv",
                    "description": PROTHOMALO_DESCRIPTION,
                },
                {
                    "name": "NGORep",
                    "csv_path": "ngorep.csv",
                    "description": NGOREP_DESCRIPTION,
                },
            ],
            indent=2,
        )
        + "\n",
        encoding="utf-8",
    )

    sidecar_path = out / "ground_truth.json"
    sidecar_path.write_text(
        json.dumps(
            {
                "seed": seed,
                "rows": rows,
                "prothomalo_columns": PROTHOMALO_COLUMNS,
                "monthly": monthly,
                "districts": per_district,
                "topics": topics,
                "annual_total": annual_total,
            },
            indent=2,
        )
        + "\n",
        encoding="utf-8",
    )

    return {
        "prothomalo": prothomalo_path,
        "ngorep": ngorep_path,
        "geometry": geojson_path,
        "manifest": manifest_path,
        "ground_truth": sidecar_path,
    }


def _district_geometry() -> dict:
    """Toy 4x3 grid of district rectangles over a Bangladesh-like extent."""
    min_lon, min_lat = 88.0, 21.0
    cell_w, cell_h = 1.05, 1.7
    features = []
    for i, district in enumerate(DISTRICTS):
        col, row = i % 4, i // 4
        x0 = min_lon + col * (cell_w + 0.05)
        y0 = min_lat + row * (cell_h + 0.05)
        ring = [
            [x0, y0], [x0 + cell_w, y0], [x0 + cell_w, y0 + cell_h],
            [x0, y0 + cell_h], [x0, y0],
        ]
        features.append(
            {
                "type": "Feature",
                "properties": {"district": district},
                "geometry": {"type": "Polygon", "coordinates": [ring]},
            }
        )
    return {"type": "FeatureCollection", "features": features}
