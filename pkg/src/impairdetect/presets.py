"""Named classifier presets, one per leaderboard row.

Defaults mirror the stock settings of a common point-and-click classification
toolbox. SVM, KNN and logistic fits see z-scored features (scaler from the
training rows only); trees and discriminants see raw features.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

from .classifiers import Kernel, fit_discriminant, fit_knn, fit_logistic, fit_standardized, fit_svm, fit_tree
from .ensembles import fit_adaboost, fit_bagging, fit_rusboost, fit_subspace

N_PREDICTORS = 2
_S = math.sqrt(N_PREDICTORS)


@dataclass(frozen=True)
class Preset:
    name: str
    family: str
    fit: Callable  # (X, y, seed) -> model
    params: dict = field(default_factory=dict)

    def __call__(self, X, y, seed=0):
        return self.fit(X, y, seed)


def _tree(max_splits):
    return Preset("", "tree", lambda X, y, seed: fit_tree(X, y, max_splits), {"max_splits": max_splits})


def _svm(kernel, box=1.0):
    return Preset("", "svm", lambda X, y, seed: fit_standardized(fit_svm, X, y, kernel=kernel, box_constraint=box),
                  {"kernel": kernel.kind, "degree": kernel.degree, "scale": kernel.scale, "box": box, "standardize": True})


def _knn(k, metric="euclidean", weighting="uniform"):
    return Preset("", "knn", lambda X, y, seed: fit_standardized(fit_knn, X, y, k=k, metric=metric, weighting=weighting),
                  {"k": k, "metric": metric, "weighting": weighting, "standardize": True})


def _named(name, preset):
    return Preset(name, preset.family, preset.fit, preset.params)


_TABLE = [
    ("Fine Tree", _tree(100)),
    ("Medium Tree", _tree(20)),
    ("Coarse Tree", _tree(4)),
    ("Linear Discriminant", Preset("", "discriminant", lambda X, y, seed: fit_discriminant(X, y, "linear"), {"kind": "linear"})),
    ("Quadratic Discriminant", Preset("", "discriminant", lambda X, y, seed: fit_discriminant(X, y, "quadratic"), {"kind": "quadratic"})),
    ("Logistic Regression", Preset("", "logistic", lambda X, y, seed: fit_standardized(fit_logistic, X, y), {"standardize": True})),
    ("Linear SVM", _svm(Kernel("linear"))),
    ("Quadratic SVM", _svm(Kernel("polynomial", degree=2))),
    ("Cubic SVM", _svm(Kernel("polynomial", degree=3))),
    ("Fine Gaussian SVM", _svm(Kernel("gaussian", scale=_S / 4))),
    ("Medium Gaussian SVM", _svm(Kernel("gaussian", scale=_S))),
    ("Coarse Gaussian SVM", _svm(Kernel("gaussian", scale=4 * _S))),
    ("Fine KNN", _knn(1)),
    ("Medium KNN", _knn(10)),
    ("Coarse KNN", _knn(100)),
    ("Cosine KNN", _knn(10, "cosine")),
    ("Cubic KNN", _knn(10, "minkowski")),
    ("Weighted KNN", _knn(10, weighting="squared_inverse")),
    ("Boosted Trees", Preset("", "ensemble", lambda X, y, seed: fit_adaboost(X, y, 30, 0.1, 20),
                             {"method": "adaboost", "n_learners": 30, "learning_rate": 0.1, "max_splits": 20})),
    ("Baged Trees", Preset("", "ensemble", lambda X, y, seed: fit_bagging(X, y, 30, seed),
                            {"method": "bag", "n_learners": 30})),
    ("Subspace Discriminant", Preset("", "ensemble", lambda X, y, seed: fit_subspace(X, y, "discriminant", 30, 1, seed),
                                     {"method": "subspace", "base": "discriminant", "n_learners": 30, "subspace_dim": 1})),
    ("Subspace KNN", Preset("", "ensemble", lambda X, y, seed: fit_subspace(X, y, "knn", 30, 1, seed),
                            {"method": "subspace", "base": "knn", "n_learners": 30, "subspace_dim": 1})),
    ("RUSBoosted Trees", Preset("", "ensemble", lambda X, y, seed: fit_rusboost(X, y, 30, 0.1, 20, seed),
                                {"method": "rusboost", "n_learners": 30, "learning_rate": 0.1, "max_splits": 20})),
]

PRESETS: dict[str, Preset] = {name: _named(name, p) for name, p in _TABLE}
DEFAULT_PRESETS: tuple[str, ...] = tuple(PRESETS)
# Table spelling is canonical; the conventional spelling resolves to it.
ALIASES = {"Bagged Trees": "Baged Trees"}


def get_preset(name) -> Preset:
    if isinstance(name, Preset):
        return name
    key = ALIASES.get(name, name)
    try:
        return PRESETS[key]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; known: {', '.join(PRESETS)}") from None
