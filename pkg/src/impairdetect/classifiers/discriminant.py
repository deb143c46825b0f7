"""Gaussian linear / quadratic discriminant analysis for two classes."""
from dataclasses import dataclass

import numpy as np

from .base import PROBABILITY, Model, as_matrix, check_xy


def regularize(cov: np.ndarray) -> np.ndarray:
    """Add eps*I (eps = 1e-6 * mean diagonal) when cov is numerically singular."""
    cov = 0.5 * (cov + cov.T)
    if np.linalg.cond(cov) < 1e12:
        return cov
    eps = 1e-6 * float(np.mean(np.diag(cov)))
    if eps <= 0:
        eps = 1e-12
    return cov + eps * np.eye(len(cov))


@dataclass
class DiscriminantModel(Model):
    kind: str
    means: np.ndarray      # (2, d)
    covs: np.ndarray       # (2, d, d); both slices equal for the linear kind
    priors: np.ndarray     # (2,)
    dim: int
    threshold: float = PROBABILITY

    def log_joint(self, X) -> np.ndarray:
        """log p(x, c) for c in {0, 1}, shape (n, 2)."""
        X = as_matrix(X, self.dim)
        out = np.empty((len(X), 2))
        for c in (0, 1):
            diff = X - self.means[c]
            sign, logdet = np.linalg.slogdet(self.covs[c])
            maha = np.einsum("ij,ij->i", diff @ np.linalg.inv(self.covs[c]), diff)
            out[:, c] = np.log(self.priors[c]) - 0.5 * (maha + logdet + self.dim * np.log(2 * np.pi))
        return out

    def scores(self, X):
        lj = self.log_joint(X)
        return 1.0 / (1.0 + np.exp(lj[:, 0] - lj[:, 1]))


def fit_discriminant(X, y, kind: str = "linear") -> DiscriminantModel:
    if kind not in ("linear", "quadratic"):
        raise ValueError(f"unknown discriminant kind {kind!r}")
    X, y = check_xy(X, y)
    counts = np.bincount(y, minlength=2)
    if counts.min() < 2:
        raise ValueError(f"each class needs >= 2 samples to estimate a covariance, got {counts.tolist()}")
    d = X.shape[1]
    means = np.stack([X[y == c].mean(axis=0) for c in (0, 1)])
    scatter = [(X[y == c] - means[c]).T @ (X[y == c] - means[c]) for c in (0, 1)]
    if kind == "linear":
        pooled = regularize((scatter[0] + scatter[1]) / (len(y) - 2))
        covs = np.stack([pooled, pooled])
    else:
        covs = np.stack([regularize(scatter[c] / (counts[c] - 1)) for c in (0, 1)])
    priors = counts / counts.sum()
    return DiscriminantModel(kind, means, covs.reshape(2, d, d), priors, d)
