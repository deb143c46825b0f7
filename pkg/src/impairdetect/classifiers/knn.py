"""k-nearest-neighbour classification with euclidean, cosine and Minkowski metrics."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .base import PROBABILITY, Model, as_matrix, check_xy

METRICS = ("euclidean", "cosine", "minkowski")
WEIGHTINGS = ("uniform", "squared_inverse")


def pairwise_distance(A, B, metric="euclidean", p=3.0) -> np.ndarray:
    A, B = np.atleast_2d(A), np.atleast_2d(B)
    if metric == "euclidean":
        return np.sqrt(((A[:, None, :] - B[None, :, :]) ** 2).sum(axis=2))
    if metric == "minkowski":
        return (np.abs(A[:, None, :] - B[None, :, :]) ** p).sum(axis=2) ** (1.0 / p)
    if metric == "cosine":
        na = np.linalg.norm(A, axis=1)[:, None]
        nb = np.linalg.norm(B, axis=1)[None, :]
        denom = na * nb
        with np.errstate(invalid="ignore", divide="ignore"):
            sim = np.where(denom > 0, (A @ B.T) / denom, 0.0)
        return np.clip(1.0 - sim, 0.0, 2.0)
    raise ValueError(f"unknown metric {metric!r}")


@dataclass
class KnnModel(Model):
    X: np.ndarray
    y: np.ndarray
    k: int
    metric: str
    weighting: str
    dim: int
    p: float = 3.0
    threshold: float = PROBABILITY

    def neighbors(self, X) -> tuple[np.ndarray, np.ndarray]:
        """Indices (n, k) of the k nearest training rows and their distances.

        Equal distances keep training-set order.
        """
        X = as_matrix(X, self.dim)
        D = pairwise_distance(X, self.X, self.metric, self.p)
        idx = np.argsort(D, axis=1, kind="stable")[:, : self.k]
        return idx, np.take_along_axis(D, idx, axis=1)

    def scores(self, X):
        idx, dist = self.neighbors(X)
        labels = self.y[idx].astype(float)
        if self.weighting == "uniform":
            return labels.mean(axis=1)
        exact = dist == 0
        hit = exact.any(axis=1)
        w = 1.0 / np.where(exact, 1.0, dist) ** 2
        # any zero-distance neighbour decides alone
        w = np.where(hit[:, None], exact.astype(float), w)
        return (w * labels).sum(1) / w.sum(1)


def fit_knn(X, y, k=10, metric="euclidean", weighting="uniform", p=3.0) -> KnnModel:
    X, y = check_xy(X, y)
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}")
    if weighting not in WEIGHTINGS:
        raise ValueError(f"unknown weighting {weighting!r}")
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > len(y):
        warnings.warn(f"k={k} exceeds training size {len(y)}; clamped", stacklevel=2)
        k = len(y)
    return KnnModel(X.copy(), y.copy(), int(k), metric, weighting, X.shape[1], p)
