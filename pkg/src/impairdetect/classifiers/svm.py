"""Soft-margin SVM trained by sequential minimal optimization.

Working-set selection follows the second-order rule of Fan, Chen & Lin
(LIBSVM), minimising f(a) = 1/2 a'Qa - e'a subject to 0 <= a <= C and
y'a = 0, with Q_ij = y_i y_j K(x_i, x_j).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .base import MARGIN, Model, as_matrix, check_xy

TAU = 1e-12


@dataclass(frozen=True)
class Kernel:
    kind: str = "linear"          # linear | polynomial | gaussian
    degree: int = 2
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in ("linear", "polynomial", "gaussian"):
            raise ValueError(f"unknown kernel {self.kind!r}")
        if self.kind == "gaussian" and not self.scale > 0:
            raise ValueError("gaussian kernel scale must be positive")

    def __call__(self, A, B) -> np.ndarray:
        A, B = np.atleast_2d(A), np.atleast_2d(B)
        if self.kind == "linear":
            return A @ B.T
        if self.kind == "polynomial":
            return (1.0 + A @ B.T) ** self.degree
        sq = (A**2).sum(1)[:, None] + (B**2).sum(1)[None, :] - 2.0 * A @ B.T
        return np.exp(-np.maximum(sq, 0.0) / self.scale**2)


class SvmConvergenceError(RuntimeError):
    def __init__(self, msg, n_iter, gap, alpha):
        super().__init__(msg)
        self.n_iter = n_iter
        self.gap = gap
        self.alpha = alpha


@dataclass
class SvmModel(Model):
    kernel: Kernel
    support_vectors: np.ndarray
    dual_coef: np.ndarray         # alpha_i * y_i, y in {-1, +1}
    bias: float
    box_constraint: float
    dim: int
    info: dict = field(default_factory=dict)
    threshold: float = MARGIN

    def scores(self, X):
        X = as_matrix(X, self.dim)
        if len(self.dual_coef) == 0:
            return np.full(len(X), self.bias)
        return self.kernel(X, self.support_vectors) @ self.dual_coef + self.bias


def dual_objective(alpha, K, ys) -> float:
    """Dual value sum(a) - 1/2 sum_ij a_i a_j y_i y_j K_ij (to be maximised)."""
    v = alpha * ys
    return float(alpha.sum() - 0.5 * v @ K @ v)


def kkt_gap(alpha, G, ys, C):
    up = ((alpha < C) & (ys > 0)) | ((alpha > 0) & (ys < 0))
    low = ((alpha < C) & (ys < 0)) | ((alpha > 0) & (ys > 0))
    v = -ys * G
    m = v[up].max() if up.any() else -np.inf
    M = v[low].min() if low.any() else np.inf
    return m - M, up, low, v


def smo(K, ys, C, tol=1e-3, max_iter=100_000):
    """Return (alpha, gradient, iterations). ys in {-1, +1}."""
    n = len(ys)
    Q = ys[:, None] * ys[None, :] * K
    diagQ = np.diag(Q).copy()
    alpha = np.zeros(n)
    G = -np.ones(n)
    for it in range(max_iter + 1):
        gap, up, low, v = kkt_gap(alpha, G, ys, C)
        if gap < tol:
            return alpha, G, it
        if it == max_iter:
            break
        i = int(np.flatnonzero(up)[np.argmax(v[up])])
        gmax = v[i]
        # second-order choice of j among violating low-set members
        cand = np.flatnonzero(low & (v < gmax))
        b = gmax - v[cand]
        a = diagQ[i] + diagQ[cand] - 2.0 * ys[i] * ys[cand] * Q[i, cand]
        a = np.where(a > 0, a, TAU)
        j = int(cand[np.argmin(-(b * b) / a)])

        ai_old, aj_old = alpha[i], alpha[j]
        if ys[i] != ys[j]:
            quad = diagQ[i] + diagQ[j] + 2.0 * Q[i, j]
            quad = quad if quad > 0 else TAU
            delta = (-G[i] - G[j]) / quad
            diff = alpha[i] - alpha[j]
            alpha[i] += delta
            alpha[j] += delta
            if diff > 0:
                if alpha[j] < 0:
                    alpha[j] = 0.0
                    alpha[i] = diff
            else:
                if alpha[i] < 0:
                    alpha[i] = 0.0
                    alpha[j] = -diff
            if diff > 0:
                if alpha[i] > C:
                    alpha[i] = C
                    alpha[j] = C - diff
            else:
                if alpha[j] > C:
                    alpha[j] = C
                    alpha[i] = C + diff
        else:
            quad = diagQ[i] + diagQ[j] - 2.0 * Q[i, j]
            quad = quad if quad > 0 else TAU
            delta = (G[i] - G[j]) / quad
            total = alpha[i] + alpha[j]
            alpha[i] -= delta
            alpha[j] += delta
            if total > C:
                if alpha[i] > C:
                    alpha[i] = C
                    alpha[j] = total - C
            else:
                if alpha[j] < 0:
                    alpha[j] = 0.0
                    alpha[i] = total
            if total > C:
                if alpha[j] > C:
                    alpha[j] = C
                    alpha[i] = total - C
            else:
                if alpha[i] < 0:
                    alpha[i] = 0.0
                    alpha[j] = total
        G += Q[:, i] * (alpha[i] - ai_old) + Q[:, j] * (alpha[j] - aj_old)
    raise SvmConvergenceError(
        f"SMO did not reach KKT tolerance {tol} in {max_iter} iterations (gap {gap:.3g})",
        max_iter, gap, alpha.copy(),
    )


def _bias(alpha, G, ys, C):
    yG = ys * G
    free = (alpha > 0) & (alpha < C)
    if free.any():
        rho = yG[free].mean()
    else:
        at_ub = alpha >= C
        at_lb = alpha <= 0
        ub_set = (at_ub & (ys < 0)) | (at_lb & (ys > 0))
        lb_set = (at_ub & (ys > 0)) | (at_lb & (ys < 0))
        ub = yG[ub_set].min() if ub_set.any() else np.inf
        lb = yG[lb_set].max() if lb_set.any() else -np.inf
        rho = 0.5 * (ub + lb)
    return -float(rho)


def fit_svm(X, y, kernel: Kernel = Kernel(), box_constraint: float = 1.0,
            tol: float = 1e-3, max_iter: int = 100_000) -> SvmModel:
    X, y = check_xy(X, y)
    if len(np.unique(y)) < 2:
        raise ValueError("SVM needs both classes present")
    if not box_constraint > 0:
        raise ValueError("box constraint must be positive")
    ys = np.where(y == 1, 1.0, -1.0)
    K = kernel(X, X)
    alpha, G, n_iter = smo(K, ys, box_constraint, tol, max_iter)
    sv = alpha > 0
    return SvmModel(
        kernel=kernel,
        support_vectors=X[sv].copy(),
        dual_coef=(alpha * ys)[sv],
        bias=_bias(alpha, G, ys, box_constraint),
        box_constraint=box_constraint,
        dim=X.shape[1],
        info={"n_iter": n_iter, "alpha": alpha, "gap": kkt_gap(alpha, G, ys, box_constraint)[0],
              "objective": dual_objective(alpha, K, ys)},
    )
