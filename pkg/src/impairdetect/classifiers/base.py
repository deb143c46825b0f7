"""Shared prediction plumbing for every fitted model.

Scores are either class-1 probabilities (threshold 0.5) or signed margins
(threshold 0). An exact tie on the threshold always predicts class 1, the
impaired class.
"""
import numpy as np

PROBABILITY = 0.5
MARGIN = 0.0


class DimensionError(ValueError):
    pass


def as_matrix(X, dim=None) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2:
        raise DimensionError(f"expected a 2-D feature matrix, got shape {X.shape}")
    if dim is not None and X.shape[1] != dim:
        raise DimensionError(f"model expects {dim} features, got {X.shape[1]}")
    return X


def check_xy(X, y):
    X = as_matrix(X)
    y = np.asarray(y).astype(int).ravel()
    if len(y) != len(X):
        raise ValueError(f"{len(X)} rows but {len(y)} labels")
    if len(y) == 0:
        raise ValueError("empty training set")
    if not np.isin(y, (0, 1)).all():
        raise ValueError("labels must be 0/1")
    return X, y


class Model:
    """Mixin: subclasses set ``dim``/``threshold`` and implement ``scores``."""

    dim: int
    threshold: float = PROBABILITY

    def scores(self, X) -> np.ndarray:
        raise NotImplementedError

    def predict(self, X) -> np.ndarray:
        return (self.scores(X) >= self.threshold).astype(int)

    def predict_one(self, x) -> tuple[int, float]:
        s = float(self.scores(as_matrix(x, self.dim))[0])
        return int(s >= self.threshold), s


def predict(model, x) -> tuple[int, float]:
    """(label, score) for one feature vector."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise DimensionError("predict takes a single feature vector; use model.scores for batches")
    return model.predict_one(x)
