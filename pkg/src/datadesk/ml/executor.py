"""Execution of MQL statements against the dataset registry.

Dispatches GENERATE/CONSTRUCT/INSPECT to the trainers and appliers, applies
WHERE filters through the tabular store, gates on accuracy, and carries the
statement's source span on every propagated error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import (
    AccuracyError,
    BindError,
    DatadeskError,
    MlError,
    SchemaError,
)
from ..mql.nodes import (
    Classification,
    Cluster,
    ConstructBody,
    GenerateBody,
    InspectBody,
    MqlStatement,
    Prediction,
    UsingAlgorithm,
    UsingModel,
)
from ..store.aggregate import evaluate_int_expr
from ..store.filters import eval_filter
from ..store.registry import Registry
from ..store.table import Table, apply_inspect
from ..store.values import Kind, Value, is_numeric
from .cluster import run_cluster
from .features import FeatureMatrix, build_features
from .linear import LinearModel, fit_ols, r_squared
from .model_store import TrainedModel, TrainingInfo, load_model, store_model
from .neighbors import KnnModel

# Default algorithm per task; the registered name table is the extension point.
ALGORITHMS: dict[str, dict[str, str]] = {
    "cluster": {"kmeans": "KMeans"},
    "prediction": {"ols": "OLS"},
    "classification": {"knn": "KNN"},
}
DEFAULT_ALGORITHM = {"cluster": "KMeans", "prediction": "OLS", "classification": "KNN"}

TRAIN_FRACTION = 0.8


# --- results -------------------------------------------------------------------


@dataclass
class LabelBlock:
    """The Bj identifier columns carried through to every result row."""

    columns: list[tuple[str, Kind]]
    rows: list[tuple[Value, ...]]


@dataclass
class Predictions:
    labels: LabelBlock
    target: str
    values: list[float]
    model: TrainedModel
    warnings: list[str] = field(default_factory=list)

    def to_table(self) -> Table:
        schema = list(self.labels.columns) + [(self.target, Kind.DECIMAL)]
        cols: list[list[Value]] = [
            [r[i] for r in self.labels.rows] for i in range(len(self.labels.columns))
        ]
        cols.append([float(v) for v in self.values])
        return Table("predictions", schema, cols)


@dataclass
class Classifications:
    labels: LabelBlock
    assigned: list[str]
    class_labels: list[str]
    model: TrainedModel
    warnings: list[str] = field(default_factory=list)

    def to_table(self) -> Table:
        schema = list(self.labels.columns) + [("class", Kind.TEXT)]
        cols: list[list[Value]] = [
            [r[i] for r in self.labels.rows] for i in range(len(self.labels.columns))
        ]
        cols.append(list(self.assigned))
        return Table("classifications", schema, cols)


@dataclass
class Clustering:
    labels: LabelBlock
    assignments: list[int]
    centroids: np.ndarray
    inertia: float
    inertia_history: list[float]
    features: FeatureMatrix
    k: int
    warnings: list[str] = field(default_factory=list)

    def sizes(self) -> list[int]:
        counts = [0] * self.k
        for a in self.assignments:
            counts[a] += 1
        return counts

    def to_table(self) -> Table:
        schema = list(self.labels.columns) + [("cluster", Kind.INT)]
        cols: list[list[Value]] = [
            [r[i] for r in self.labels.rows] for i in range(len(self.labels.columns))
        ]
        cols.append(list(self.assignments))
        return Table("clustering", schema, cols)

    def summary_table(self) -> Table:
        sizes = self.sizes()
        return Table(
            "cluster_summary",
            [("cluster", Kind.INT), ("size", Kind.INT)],
            [list(range(self.k)), sizes],
        )


MlResult = Predictions | Classifications | Clustering


# --- helpers -------------------------------------------------------------------


def split_indices(n: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Seeded 80/20 row shuffle; both sides are non-empty for n >= 2."""
    rng = np.random.Generator(np.random.PCG64(seed))
    perm = rng.permutation(n)
    n_train = min(max(1, math.floor(TRAIN_FRACTION * n)), n - 1)
    return np.sort(perm[:n_train]), np.sort(perm[n_train:])


def gate_accuracy(model: TrainedModel, threshold: float | None) -> None:
    """Raise AccuracyError when the stored holdout accuracy misses the gate."""
    if threshold is None:
        return
    if model.training.holdout_accuracy < threshold:
        raise AccuracyError(model.training.holdout_accuracy, threshold)


def _resolve_algorithm(task: str, using) -> str:
    if isinstance(using, UsingAlgorithm):
        canonical = ALGORITHMS[task].get(using.name.lower())
        if canonical is None:
            supported = ", ".join(sorted(ALGORITHMS[task].values()))
            raise MlError(
                f"unknown {task} algorithm {using.name!r}; supported: {supported}"
            )
        return canonical
    return DEFAULT_ALGORITHM[task]


def _label_block(table: Table, label_cols: tuple[str, ...]) -> LabelBlock:
    if label_cols:
        idx = [table.column_index(c) for c in label_cols]
        columns = [table.schema[i] for i in idx]
        rows = [tuple(table.columns[i][r] for i in idx) for r in range(table.row_count)]
        return LabelBlock(columns, rows)
    return LabelBlock([("row", Kind.INT)], [(r,) for r in range(table.row_count)])


def _feature_columns(body, exclude: set[str]) -> list[str]:
    # LABEL columns (and the class/target column) never join the matrix.
    return [c for c in body.features if c not in exclude]


def _check_over_schema(over: Table, model: TrainedModel) -> None:
    needed = list(model.feature_columns) + [c for c in model.label_columns]
    missing = [c for c in needed if c not in over.column_names]
    if missing:
        raise SchemaError(
            f"table {over.name!r} lacks column(s) {', '.join(repr(m) for m in missing)} "
            "required by the model"
        )


class ExecutionContext:
    """Shared lookups for one script/session: registry plus INSPECT overlays."""

    def __init__(self, registry: Registry, model_dir: str | None = None, seed: int = 42):
        self.registry = registry
        self.model_dir = model_dir
        self.seed = seed
        self.overrides: dict[str, Table] = {}

    def resolve(self, name: str) -> Table:
        if name in self.overrides:
            return self.overrides[name]
        if name not in self.registry:
            raise BindError(f"unknown table {name!r}")
        return self.registry.table(name)


# --- training ------------------------------------------------------------------


def train_predictor(
    features: np.ndarray, target: np.ndarray, seed: int
) -> tuple[LinearModel, float]:
    """OLS with holdout accuracy max(0, R^2); final weights refit on all rows."""
    train_idx, test_idx = split_indices(len(target), seed)
    holdout_model = fit_ols(features[train_idx], target[train_idx])
    accuracy = max(0.0, r_squared(target[test_idx], holdout_model.predict(features[test_idx])))
    return fit_ols(features, target), accuracy


def train_classifier(
    features: np.ndarray, classes: list[str], label_order: list[str], seed: int
) -> tuple[KnnModel, float]:
    """kNN(5) with seeded holdout accuracy; neighbor store keeps all rows."""
    offenders = sorted({c for c in classes if c not in label_order})
    if offenders:
        raise MlError(
            "training classes outside the declared label set: "
            + ", ".join(repr(o) for o in offenders)
        )
    if len(set(classes)) < 2:
        raise MlError("training data holds a single class; need at least 2")
    train_idx, test_idx = split_indices(len(classes), seed)
    holdout = KnnModel(
        features[train_idx], [classes[i] for i in train_idx], list(label_order)
    )
    predicted = holdout.predict(features[test_idx])
    actual = [classes[i] for i in test_idx]
    accuracy = sum(p == a for p, a in zip(predicted, actual)) / len(actual)
    return KnnModel(features, list(classes), list(label_order)), accuracy


# --- application ----------------------------------------------------------------


def apply_model(model: TrainedModel, over_table: Table) -> MlResult:
    """Apply a stored/trained model to new rows using its fitted encoder."""
    _check_over_schema(over_table, model)
    matrix, _ = build_features(over_table, model.feature_columns, model.encoder)
    labels = _label_block(over_table, tuple(model.label_columns))
    if model.task == "prediction":
        values = model.linear.predict(matrix.data)
        return Predictions(labels, model.target or "prediction", [float(v) for v in values], model)
    if model.task == "classification":
        assigned = model.knn.predict(matrix.data)
        return Classifications(labels, assigned, list(model.class_labels), model)
    d2 = ((matrix.data[:, None, :] - model.centroids[None, :, :]) ** 2).sum(axis=2)
    assignments = [int(a) for a in d2.argmin(axis=1)]
    inertia = float(d2[np.arange(len(assignments)), assignments].sum())
    return Clustering(
        labels, assignments, model.centroids, inertia, [inertia], matrix,
        int(model.centroids.shape[0]),
    )


# --- statement execution ---------------------------------------------------------


def _numeric_target(table: Table, column: str) -> np.ndarray:
    kind = table.kind_of(column)
    if not is_numeric(kind):
        raise MlError(f"prediction target {column!r} must be numeric, is {kind.value}")
    cells = table.column(column)
    if any(v is None for v in cells):
        raise MlError(f"prediction target {column!r} contains Nulls; clean with INSPECT first")
    return np.asarray([float(v) for v in cells], dtype=float)


def _class_column(table: Table, feature_cols: tuple[str, ...], declared: list[str]) -> str:
    """First FEATURES column whose values intersect the declared label set."""
    for col in feature_cols:
        cells = {str(v) for v in table.column(col) if v is not None}
        if cells & set(declared):
            return col
    raise MlError(
        "no FEATURES column contains the declared class labels "
        + ", ".join(repr(d) for d in declared)
    )


def _train_from_body(
    body: GenerateBody | ConstructBody,
    view: Table,
    ctx: ExecutionContext,
    model_name: str,
    warnings: list[str],
) -> TrainedModel:
    task = body.task
    if isinstance(task, Cluster):
        algorithm = _resolve_algorithm("cluster", body.using)
        k = evaluate_int_expr(task.k, [ctx.resolve(body.from_tables[0])])
        feature_cols = _feature_columns(body, set(body.label))
        matrix, encoder = build_features(view, feature_cols)
        result = run_cluster(matrix.data, k, algorithm, ctx.seed)
        if body.accuracy is not None:
            warnings.append(
                "ACCURACY has no ground truth for clustering and was ignored"
            )
        return TrainedModel(
            name=model_name, task="cluster", algorithm=algorithm,
            feature_columns=feature_cols, label_columns=list(body.label),
            encoder=encoder,
            training=TrainingInfo(view.name, view.row_count, ctx.seed, 1.0),
            k=k, centroids=result.centroids,
        )
    if isinstance(task, Prediction):
        algorithm = _resolve_algorithm("prediction", body.using)
        feature_cols = _feature_columns(body, set(body.label) | {task.target})
        if not feature_cols:
            raise MlError("no feature columns remain after excluding LABEL/target")
        matrix, encoder = build_features(view, feature_cols)
        target = _numeric_target(view, task.target)
        linear, accuracy = train_predictor(matrix.data, target, ctx.seed)
        return TrainedModel(
            name=model_name, task="prediction", algorithm=algorithm,
            feature_columns=feature_cols, label_columns=list(body.label),
            encoder=encoder,
            training=TrainingInfo(view.name, view.row_count, ctx.seed, accuracy),
            target=task.target, linear=linear,
        )
    # Classification
    algorithm = _resolve_algorithm("classification", body.using)
    declared = [str(lb.value) for lb in task.labels]
    class_col = _class_column(view, body.features, declared)
    feature_cols = _feature_columns(body, set(body.label) | {class_col})
    if not feature_cols:
        raise MlError("no feature columns remain after excluding the class column")
    matrix, encoder = build_features(view, feature_cols)
    classes = [str(v) for v in view.column(class_col)]
    knn, accuracy = train_classifier(matrix.data, classes, declared, ctx.seed)
    return TrainedModel(
        name=model_name, task="classification", algorithm=algorithm,
        feature_columns=feature_cols, label_columns=list(body.label),
        encoder=encoder,
        training=TrainingInfo(view.name, view.row_count, ctx.seed, accuracy),
        class_labels=declared, knn=knn,
    )


def _task_kind(task) -> str:
    if isinstance(task, Cluster):
        return "cluster"
    if isinstance(task, Prediction):
        return "prediction"
    return "classification"


def _execute_generate(body: GenerateBody, ctx: ExecutionContext) -> MlResult:
    if len(body.from_tables) != 1:
        raise BindError(
            "execution supports exactly one FROM table; got "
            + ", ".join(body.from_tables)
        )
    source = ctx.resolve(body.from_tables[0])
    view = source.take(eval_filter(source, body.where)) if body.where is not None else source
    warnings: list[str] = []

    over_name = getattr(body.task, "over", None)

    if isinstance(body.using, UsingModel):
        if ctx.model_dir is None:
            raise MlError("no model store configured; cannot resolve USING MODEL")
        model = load_model(body.using.name, ctx.model_dir)
        if model.task != _task_kind(body.task):
            raise MlError(
                f"model {model.name!r} was built for {model.task}, "
                f"not {_task_kind(body.task)}"
            )
        if model.task != "cluster":
            gate_accuracy(model, body.accuracy)
        elif body.accuracy is not None:
            warnings.append("ACCURACY has no ground truth for clustering and was ignored")
        target_table = ctx.resolve(over_name) if over_name else view
        result = apply_model(model, target_table)
        result.warnings.extend(warnings)
        return result

    if view.row_count == 0:
        raise MlError("no rows to learn from after applying WHERE")

    if isinstance(body.task, Cluster):
        algorithm = _resolve_algorithm("cluster", body.using)
        k = evaluate_int_expr(body.task.k, [source])
        feature_cols = _feature_columns(body, set(body.label))
        matrix, _ = build_features(view, feature_cols)
        km = run_cluster(matrix.data, k, algorithm, ctx.seed)
        if body.accuracy is not None:
            warnings.append("ACCURACY has no ground truth for clustering and was ignored")
        return Clustering(
            _label_block(view, body.label),
            [int(a) for a in km.assignments], km.centroids, km.inertia,
            km.inertia_history, matrix, k, warnings,
        )

    model = _train_from_body(body, view, ctx, model_name="(inline)", warnings=warnings)
    gate_accuracy(model, body.accuracy)
    target_table = ctx.resolve(over_name) if over_name else view
    result = apply_model(model, target_table)
    result.warnings.extend(warnings)
    return result


def _execute_construct(body: ConstructBody, ctx: ExecutionContext) -> Table:
    if len(body.from_tables) != 1:
        raise BindError(
            "execution supports exactly one FROM table; got "
            + ", ".join(body.from_tables)
        )
    if ctx.model_dir is None:
        raise MlError("no model store configured; cannot CONSTRUCT a model")
    source = ctx.resolve(body.from_tables[0])
    view = source.take(eval_filter(source, body.where)) if body.where is not None else source
    if view.row_count == 0:
        raise MlError("no rows to learn from after applying WHERE")
    warnings: list[str] = []
    model = _train_from_body(body, view, ctx, model_name=body.model_name, warnings=warnings)
    if model.task != "cluster":
        gate_accuracy(model, body.accuracy)
    store_model(model, ctx.model_dir)
    return Table(
        "model_metadata",
        [
            ("name", Kind.TEXT), ("task", Kind.TEXT), ("algorithm", Kind.TEXT),
            ("dataset", Kind.TEXT), ("rows", Kind.INT),
            ("holdout_accuracy", Kind.DECIMAL),
        ],
        [
            [model.name], [model.task], [model.algorithm],
            [model.training.dataset], [model.training.rows],
            [model.training.holdout_accuracy],
        ],
    )


def _execute_inspect(body: InspectBody, ctx: ExecutionContext) -> Table:
    table = ctx.resolve(body.table)
    cleaned = apply_inspect(table, list(body.directives))
    # Later statements in the same context see the cleaned table.
    ctx.overrides[body.table] = cleaned
    return cleaned


def execute_mql(
    stmt: MqlStatement,
    registry: Registry,
    *,
    seed: int = 42,
    model_dir: str | None = None,
    context: ExecutionContext | None = None,
) -> MlResult | Table:
    """Execute one parsed statement; errors carry the statement span."""
    ctx = context if context is not None else ExecutionContext(registry, model_dir, seed)
    try:
        if isinstance(stmt.body, GenerateBody):
            return _execute_generate(stmt.body, ctx)
        if isinstance(stmt.body, ConstructBody):
            return _execute_construct(stmt.body, ctx)
        return _execute_inspect(stmt.body, ctx)
    except DatadeskError as err:
        if err.span is None:
            err.span = stmt.source_span
        raise
