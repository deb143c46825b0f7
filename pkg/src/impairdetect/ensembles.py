"""Tree and subspace ensembles: AdaBoost.M1, bagging, RUSBoost, random subspace."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .classifiers import fit_discriminant, fit_knn, fit_standardized, fit_tree
from .classifiers.base import MARGIN, PROBABILITY, Model, as_matrix, check_xy
from .rng import make_rng

PERFECT_ODDS = 1e10  # alpha for a zero-error round is learning_rate * 0.5 * ln(PERFECT_ODDS)


@dataclass
class Member:
    model: Model
    weight: float = 1.0
    features: tuple = ()
    error: float | None = None


@dataclass
class EnsembleModel(Model):
    method: str                  # adaboost | rusboost | bag | subspace
    members: list
    dim: int
    n_learners: int
    learning_rate: float = 1.0
    history: dict = field(default_factory=dict)

    @property
    def threshold(self):
        return MARGIN if self.method in ("adaboost", "rusboost") else PROBABILITY

    def member_outputs(self, X) -> np.ndarray:
        """(n_members, n) matrix: +-1 votes for boosting, member scores for subspace, 0/1 votes for bagging."""
        X = as_matrix(X, self.dim)
        rows = []
        for m in self.members:
            Xm = X[:, list(m.features)]
            if self.method in ("adaboost", "rusboost"):
                rows.append(2.0 * m.model.predict(Xm) - 1.0)
            elif self.method == "bag":
                rows.append(m.model.predict(Xm).astype(float))
            else:
                rows.append(m.model.scores(Xm))
        return np.array(rows).reshape(len(self.members), len(X))

    def scores(self, X):
        X = as_matrix(X, self.dim)
        if not self.members:
            return np.zeros(len(X))
        out = self.member_outputs(X)
        if self.method in ("adaboost", "rusboost"):
            return np.array([m.weight for m in self.members]) @ out
        return out.mean(axis=0)


def _check_two_class(y):
    if len(np.unique(y)) < 2:
        raise ValueError("ensemble fitting needs both classes present")


def _boost(X, y, n_learners, learning_rate, max_splits, method, rng=None):
    n, d = X.shape
    features = tuple(range(d))
    ys = 2.0 * y - 1.0
    w = np.full(n, 1.0 / n)
    members, errors, subsets = [], [], []
    for _ in range(n_learners):
        if method == "rusboost":
            idx = _undersample(y, w, rng)
            subsets.append(idx)
            tree = fit_tree(X[idx], y[idx], max_splits, w[idx] / w[idx].sum())
        else:
            tree = fit_tree(X, y, max_splits, w)
        h = 2.0 * tree.predict(X) - 1.0
        miss = h != ys
        eps = float(w[miss].sum())
        if eps >= 0.5:
            break
        errors.append(eps)
        if eps <= 0.0:
            members.append(Member(tree, learning_rate * 0.5 * np.log(PERFECT_ODDS), features, eps))
            break
        alpha = learning_rate * 0.5 * np.log((1.0 - eps) / eps)
        members.append(Member(tree, alpha, features, eps))
        w = w * np.exp(-alpha * ys * h)
        w = w / w.sum()
    history = {"errors": errors}
    if method == "rusboost":
        history["subsets"] = subsets
    return EnsembleModel(method, members, d, n_learners, learning_rate, history)


def _undersample(y, w, rng):
    """All minority rows plus an equal-size draw (without replacement, p ~ w) of the majority."""
    n1 = int(y.sum())
    n0 = len(y) - n1
    if n0 == n1:
        return np.arange(len(y))
    minority = 1 if n1 < n0 else 0
    keep = np.flatnonzero(y == minority)
    major = np.flatnonzero(y != minority)
    p = w[major] / w[major].sum()
    picked = rng.choice(major, size=len(keep), replace=False, p=p)
    return np.sort(np.concatenate([keep, picked]))


def fit_adaboost(X, y, n_learners=30, learning_rate=0.1, max_splits=20) -> EnsembleModel:
    """AdaBoost.M1 on weighted trees.

    A round with weighted error >= 0.5 is discarded and ends boosting; a round
    with zero error is kept with a capped weight and ends boosting.
    """
    X, y = check_xy(X, y)
    _check_two_class(y)
    return _boost(X, y, n_learners, learning_rate, max_splits, "adaboost")


def fit_rusboost(X, y, n_learners=30, learning_rate=0.1, max_splits=20, seed=0) -> EnsembleModel:
    X, y = check_xy(X, y)
    _check_two_class(y)
    return _boost(X, y, n_learners, learning_rate, max_splits, "rusboost",
                  make_rng(seed, "ensemble.rusboost"))


def fit_bagging(X, y, n_learners=30, seed=0, max_splits=None) -> EnsembleModel:
    X, y = check_xy(X, y)
    n, d = X.shape
    max_splits = n - 1 if max_splits is None else max_splits
    members, draws = [], []
    for m in range(n_learners):
        idx = make_rng(seed, f"ensemble.bag.{m}").integers(0, n, size=n)
        draws.append(idx)
        members.append(Member(fit_tree(X[idx], y[idx], max_splits), 1.0, tuple(range(d))))
    return EnsembleModel("bag", members, d, n_learners, 1.0, {"bootstrap": draws})


def subspace_features(seed, member, dim, subspace_dim) -> tuple:
    rng = make_rng(seed, f"ensemble.subspace.{member}")
    return tuple(sorted(int(f) for f in rng.choice(dim, size=subspace_dim, replace=False)))


def _subspace_base(base):
    if callable(base):
        return base
    if base == "discriminant":
        return lambda X, y: fit_discriminant(X, y, "linear")
    if base == "knn":
        return lambda X, y: fit_standardized(fit_knn, X, y, k=1)
    raise ValueError(f"unknown subspace base {base!r}")


def fit_subspace(X, y, base="discriminant", n_learners=30, subspace_dim=None, seed=0) -> EnsembleModel:
    X, y = check_xy(X, y)
    d = X.shape[1]
    subspace_dim = max(1, d // 2) if subspace_dim is None else subspace_dim
    if not 1 <= subspace_dim <= d:
        raise ValueError(f"subspace_dim must be in [1, {d}], got {subspace_dim}")
    fit = _subspace_base(base)
    members = []
    for m in range(n_learners):
        feats = subspace_features(seed, m, d, subspace_dim)
        members.append(Member(fit(X[:, list(feats)], y), 1.0, feats))
    return EnsembleModel("subspace", members, d, n_learners, 1.0)
