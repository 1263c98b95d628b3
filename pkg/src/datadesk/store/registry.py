"""Dataset registry: named tables paired with natural-language descriptions.

The registry is in-memory with a persisted JSON manifest (see
docs/formats.md). Tables reload lazily from their source CSVs; datasets are
snapshot files, not a live DBMS.
"""

from __future__ import annotations

import datetime as dt
import json
import threading
from dataclasses import dataclass
from pathlib import Path

from ..errors import IngestError, RegistryError
from .table import Table, ingest_csv
from .values import Kind


@dataclass
class DatasetDescriptor:
    name: str
    description: str
    source_path: str
    ingested_at: str  # ISO timestamp of when this process loaded/registered it
    declared_schema: dict[str, Kind] | None = None


def _now() -> str:
    return dt.datetime.now(dt.timezone.utc).isoformat(timespec="seconds")


class Registry:
    """Multi-reader dataset registry; registration is serialized."""

    def __init__(self, manifest_path: str | Path | None = None):
        self.manifest_path = Path(manifest_path) if manifest_path else None
        self._descriptors: dict[str, DatasetDescriptor] = {}
        self._tables: dict[str, Table] = {}
        self._order: list[str] = []
        self._lock = threading.RLock()
        if self.manifest_path and self.manifest_path.exists():
            self._load_manifest()

    # -- manifest ------------------------------------------------------------

    def _load_manifest(self) -> None:
        try:
            entries = json.loads(self.manifest_path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise RegistryError(f"cannot read manifest {self.manifest_path}: {exc}") from exc
        if not isinstance(entries, list):
            raise RegistryError(f"manifest {self.manifest_path} must be a JSON array")
        for entry in entries:
            declared = entry.get("declared_schema")
            self._descriptors[entry["name"]] = DatasetDescriptor(
                name=entry["name"],
                description=entry["description"],
                source_path=entry["csv_path"],
                ingested_at=_now(),
                declared_schema={k: Kind(v) for k, v in declared.items()} if declared else None,
            )
            self._order.append(entry["name"])

    def _save_manifest(self) -> None:
        if self.manifest_path is None:
            return
        entries = []
        for name in self._order:
            d = self._descriptors[name]
            entry: dict = {
                "name": d.name,
                "csv_path": d.source_path,
                "description": d.description,
            }
            if d.declared_schema:
                entry["declared_schema"] = {k: v.value for k, v in d.declared_schema.items()}
            entries.append(entry)
        self.manifest_path.parent.mkdir(parents=True, exist_ok=True)
        tmp = self.manifest_path.with_suffix(".tmp")
        tmp.write_text(json.dumps(entries, indent=2) + "\n", encoding="utf-8")
        tmp.replace(self.manifest_path)

    # -- registration ----------------------------------------------------------

    def register(
        self,
        table: Table,
        description: str,
        source_path: str | Path,
        declared_schema: dict[str, Kind] | None = None,
    ) -> DatasetDescriptor:
        """Add a dataset with its description; persists the manifest."""
        if not description or not description.strip():
            raise RegistryError("dataset description must be non-empty")
        with self._lock:
            if table.name in self._descriptors:
                raise RegistryError(f"dataset {table.name!r} is already registered")
            descriptor = DatasetDescriptor(
                name=table.name,
                description=description,
                source_path=str(source_path),
                ingested_at=_now(),
                declared_schema=declared_schema,
            )
            self._descriptors[table.name] = descriptor
            self._tables[table.name] = table
            self._order.append(table.name)
            self._save_manifest()
            return descriptor

    # -- lookup ---------------------------------------------------------------

    def names(self) -> list[str]:
        return list(self._order)

    def descriptors(self) -> list[DatasetDescriptor]:
        return [self._descriptors[n] for n in self._order]

    def descriptor(self, name: str) -> DatasetDescriptor:
        try:
            return self._descriptors[name]
        except KeyError:
            raise RegistryError(f"no dataset named {name!r}") from None

    def __contains__(self, name: str) -> bool:
        return name in self._descriptors

    def table(self, name: str) -> Table:
        """The dataset's table, ingesting its CSV on first access."""
        with self._lock:
            if name in self._tables:
                return self._tables[name]
            d = self.descriptor(name)
            path = Path(d.source_path)
            if not path.is_absolute() and self.manifest_path is not None:
                path = self.manifest_path.parent / path
            if not path.exists():
                raise IngestError(f"dataset {name!r}: source CSV {path} not found")
            table = ingest_csv(path, name=name, declared_schema=d.declared_schema)
            self._tables[name] = table
            return table
