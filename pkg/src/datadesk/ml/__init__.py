"""ML runtime: featurization, clustering, regression, classification,
model persistence and MQL statement execution."""

from .cluster import KMeansResult, run_cluster
from .executor import (
    Classifications,
    Clustering,
    ExecutionContext,
    MlResult,
    Predictions,
    apply_model,
    execute_mql,
    gate_accuracy,
    split_indices,
    train_classifier,
    train_predictor,
)
from .features import FeatureMatrix, FittedEncoder, build_features, tokenize_text
from .linear import LinearModel, fit_ols, r_squared
from .model_store import TrainedModel, TrainingInfo, load_model, store_model
from .neighbors import KnnModel

__all__ = [
    "Classifications", "Clustering", "ExecutionContext", "FeatureMatrix",
    "FittedEncoder", "KMeansResult", "KnnModel", "LinearModel", "MlResult",
    "Predictions", "TrainedModel", "TrainingInfo",
    "apply_model", "build_features", "execute_mql", "fit_ols",
    "gate_accuracy", "load_model", "r_squared", "run_cluster",
    "split_indices", "store_model", "tokenize_text", "train_classifier",
    "train_predictor",
]
