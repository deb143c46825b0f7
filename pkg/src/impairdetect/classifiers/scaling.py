from dataclasses import dataclass

import numpy as np

from .base import Model, as_matrix


@dataclass
class Standardized(Model):
    """Wraps a model fitted on z-scored features; the scaler comes from the training rows only."""

    inner: Model
    mean: np.ndarray
    scale: np.ndarray

    @property
    def dim(self):
        return len(self.mean)

    @property
    def threshold(self):
        return self.inner.threshold

    def transform(self, X):
        return (as_matrix(X, self.dim) - self.mean) / self.scale

    def scores(self, X):
        return self.inner.scores(self.transform(X))


def fit_standardized(fit, X, y, **kwargs) -> Standardized:
    X = as_matrix(X)
    mean = X.mean(axis=0)
    scale = X.std(axis=0, ddof=1) if len(X) > 1 else np.ones(X.shape[1])
    scale = np.where(scale > 0, scale, 1.0)
    return Standardized(fit((X - mean) / scale, y, **kwargs), mean, scale)
