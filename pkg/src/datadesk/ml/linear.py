"""Ordinary least squares with an intercept, solved via normal equations."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import MlError

RIDGE_JITTER = 1e-8


@dataclass
class LinearModel:
    weights: np.ndarray    # shape (d,)
    intercept: float

    def predict(self, points: np.ndarray) -> np.ndarray:
        return points @ self.weights + self.intercept


def fit_ols(points: np.ndarray, target: np.ndarray) -> LinearModel:
    """Least-squares fit of target on points plus an intercept column.

    Normal equations with a ridge jitter of 1e-8 on the diagonal guard
    against rank deficiency while leaving well-posed fits untouched.
    """
    n, d = points.shape
    if n < 2:
        raise MlError(f"need at least 2 rows to fit a predictor, got {n}")
    design = np.hstack([points, np.ones((n, 1))])
    gram = design.T @ design + RIDGE_JITTER * np.eye(d + 1)
    coef = np.linalg.solve(gram, design.T @ target)
    return LinearModel(coef[:-1], float(coef[-1]))


def r_squared(actual: np.ndarray, predicted: np.ndarray) -> float:
    """Coefficient of determination; defined for zero-variance targets as
    1.0 when predictions are exact up to the solver's ridge-jitter scale
    (|err| < 1e-6) and 0.0 otherwise."""
    residual = float(((actual - predicted) ** 2).sum())
    total = float(((actual - actual.mean()) ** 2).sum())
    if total == 0.0:
        return 1.0 if float(np.abs(actual - predicted).max(initial=0.0)) < 1e-6 else 0.0
    return 1.0 - residual / total
