"""Binary logistic regression by Newton / IRLS with a tiny ridge."""
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .base import PROBABILITY, Model, as_matrix, check_xy


def _design(X):
    return np.hstack([np.ones((len(X), 1)), X])


def _penalty_mask(p):
    m = np.ones(p)
    m[0] = 0.0  # intercept is not penalised
    return m


sigmoid = expit


def log_likelihood(w, X, y, ridge=1e-8) -> float:
    """Penalised log-likelihood; w[0] is the intercept."""
    A = _design(as_matrix(X))
    t = A @ w
    # y*t - log(1 + e^t), computed stably
    ll = np.sum(y * t - np.logaddexp(0.0, t))
    return float(ll - 0.5 * ridge * np.sum(_penalty_mask(len(w)) * w**2))


def log_likelihood_grad(w, X, y, ridge=1e-8) -> np.ndarray:
    A = _design(as_matrix(X))
    return A.T @ (y - sigmoid(A @ w)) - ridge * _penalty_mask(len(w)) * w


@dataclass
class LogisticModel(Model):
    weights: np.ndarray
    dim: int
    n_iter: int = 0
    converged: bool = True
    threshold: float = PROBABILITY

    def scores(self, X):
        X = as_matrix(X, self.dim)
        return sigmoid(self.weights[0] + X @ self.weights[1:])


def fit_logistic(X, y, ridge=1e-8, tol=1e-8, max_iter=200) -> LogisticModel:
    X, y = check_xy(X, y)
    A = _design(X)
    p = A.shape[1]
    mask = _penalty_mask(p)
    w = np.zeros(p)
    ll = log_likelihood(w, X, y, ridge)
    it = 0
    converged = False
    for it in range(1, max_iter + 1):
        g = log_likelihood_grad(w, X, y, ridge)
        if np.max(np.abs(g)) < tol:
            converged = True
            break
        mu = sigmoid(A @ w)
        H = (A * (mu * (1 - mu))[:, None]).T @ A + np.diag(ridge * mask)
        try:
            step = np.linalg.solve(H + 1e-12 * np.eye(p), g)
        except np.linalg.LinAlgError:
            step = g
        # backtrack so the penalised likelihood never decreases
        t = 1.0
        while t > 1e-10:
            cand = w + t * step
            cand_ll = log_likelihood(cand, X, y, ridge)
            if np.all(np.isfinite(cand)) and cand_ll >= ll:
                break
            t *= 0.5
        else:
            break
        w, ll = cand, cand_ll
    return LogisticModel(w, X.shape[1], n_iter=it, converged=converged)
