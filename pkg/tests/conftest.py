"""Shared fixtures: seeded fixture datasets and registries."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from datadesk.fixtures import generate_fixtures
from datadesk.store import Registry


@pytest.fixture(scope="session")
def fx300(tmp_path_factory) -> dict[str, Path]:
    return generate_fixtures(tmp_path_factory.mktemp("fx300"), rows=300, seed=42)


@pytest.fixture(scope="session")
def fx5000(tmp_path_factory) -> dict[str, Path]:
    return generate_fixtures(tmp_path_factory.mktemp("fx5000"), rows=5000, seed=42)


@pytest.fixture(scope="session")
def fx30(tmp_path_factory) -> dict[str, Path]:
    return generate_fixtures(tmp_path_factory.mktemp("fx30"), rows=30, seed=42)


@pytest.fixture(scope="session")
def ground_truth_300(fx300) -> dict:
    return json.loads(fx300["ground_truth"].read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def registry300(fx300) -> Registry:
    # Shared read-only registry; tests that register datasets build their own.
    return Registry(fx300["manifest"])
