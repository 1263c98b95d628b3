"""Persistent trained models: one self-describing JSON record per model.

Files live under a configurable directory as <name>.model.json; writes are
atomic (temp file + rename) so concurrent stores of distinct names are safe.
The schema is documented in docs/formats.md and carries a format_version.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import ModelNotFound, RegistryError
from .features import FittedEncoder, NumericEncoder, OneHotEncoder, TfidfEncoder
from .linear import LinearModel
from .neighbors import KnnModel

FORMAT_VERSION = 1


@dataclass
class TrainingInfo:
    dataset: str
    rows: int
    seed: int
    holdout_accuracy: float


@dataclass
class TrainedModel:
    name: str
    task: str               # "prediction" | "classification" | "cluster"
    algorithm: str
    feature_columns: list[str]
    label_columns: list[str]
    encoder: FittedEncoder
    training: TrainingInfo
    target: str | None = None                 # prediction
    class_labels: list[str] = field(default_factory=list)  # classification
    k: int | None = None                      # cluster
    linear: LinearModel | None = None
    knn: KnnModel | None = None
    centroids: np.ndarray | None = None

    def to_record(self) -> dict:
        encoders = []
        for enc in self.encoder.encoders:
            if isinstance(enc, NumericEncoder):
                encoders.append({"type": "numeric", "column": enc.column,
                                 "mean": enc.mean, "std": enc.std})
            elif isinstance(enc, OneHotEncoder):
                encoders.append({"type": "one_hot", "column": enc.column, "vocab": enc.vocab})
            else:
                encoders.append({"type": "tfidf", "column": enc.column,
                                 "vocab": enc.vocab, "idf": enc.idf})
        params: dict = {}
        if self.linear is not None:
            params = {"weights": self.linear.weights.tolist(), "intercept": self.linear.intercept}
        elif self.knn is not None:
            params = {
                "points": self.knn.points.tolist(),
                "classes": self.knn.classes,
                "k_neighbors": self.knn.k,
            }
        elif self.centroids is not None:
            params = {"centroids": self.centroids.tolist()}
        record = {
            "format_version": FORMAT_VERSION,
            "name": self.name,
            "task": self.task,
            "algorithm": self.algorithm,
            "feature_columns": self.feature_columns,
            "label_columns": self.label_columns,
            "encoders": encoders,
            "params": params,
            "training": {
                "dataset": self.training.dataset,
                "rows": self.training.rows,
                "seed": self.training.seed,
                "holdout_accuracy": self.training.holdout_accuracy,
            },
        }
        if self.target is not None:
            record["target"] = self.target
        if self.class_labels:
            record["class_labels"] = self.class_labels
        if self.k is not None:
            record["k"] = self.k
        return record

    @staticmethod
    def from_record(record: dict) -> "TrainedModel":
        if record.get("format_version") != FORMAT_VERSION:
            raise RegistryError(
                f"unsupported model format_version {record.get('format_version')!r}"
            )
        encoders = []
        for enc in record["encoders"]:
            if enc["type"] == "numeric":
                encoders.append(NumericEncoder(enc["column"], enc["mean"], enc["std"]))
            elif enc["type"] == "one_hot":
                encoders.append(OneHotEncoder(enc["column"], list(enc["vocab"])))
            else:
                encoders.append(TfidfEncoder(enc["column"], list(enc["vocab"]), list(enc["idf"])))
        params = record.get("params", {})
        linear = knn = centroids = None
        if "weights" in params:
            linear = LinearModel(np.asarray(params["weights"], dtype=float), float(params["intercept"]))
        elif "points" in params:
            knn = KnnModel(
                np.asarray(params["points"], dtype=float),
                list(params["classes"]),
                list(record.get("class_labels", [])),
                int(params.get("k_neighbors", 5)),
            )
        elif "centroids" in params:
            centroids = np.asarray(params["centroids"], dtype=float)
        info = record["training"]
        return TrainedModel(
            name=record["name"],
            task=record["task"],
            algorithm=record["algorithm"],
            feature_columns=list(record["feature_columns"]),
            label_columns=list(record["label_columns"]),
            encoder=FittedEncoder(encoders),
            training=TrainingInfo(info["dataset"], info["rows"], info["seed"],
                                  info["holdout_accuracy"]),
            target=record.get("target"),
            class_labels=list(record.get("class_labels", [])),
            k=record.get("k"),
            linear=linear,
            knn=knn,
            centroids=centroids,
        )

    def structurally_equal(self, other: "TrainedModel") -> bool:
        return self.to_record() == other.to_record()


def model_path(store_dir: str | Path, name: str) -> Path:
    return Path(store_dir) / f"{name}.model.json"


def store_model(model: TrainedModel, store_dir: str | Path) -> Path:
    store_dir = Path(store_dir)
    store_dir.mkdir(parents=True, exist_ok=True)
    path = model_path(store_dir, model.name)
    payload = json.dumps(model.to_record(), indent=2) + "\n"
    tmp = store_dir / f".{model.name}.model.json.{os.getpid()}.tmp"
    tmp.write_text(payload, encoding="utf-8")
    tmp.replace(path)
    return path


def load_model(name: str, store_dir: str | Path) -> TrainedModel:
    path = model_path(store_dir, name)
    if not path.exists():
        raise ModelNotFound(f"no stored model named {name!r} in {store_dir}")
    return TrainedModel.from_record(json.loads(path.read_text(encoding="utf-8")))
