from .base import MARGIN, PROBABILITY, DimensionError, Model, predict
from .discriminant import DiscriminantModel, fit_discriminant
from .knn import KnnModel, fit_knn, pairwise_distance
from .logistic import LogisticModel, fit_logistic, log_likelihood, log_likelihood_grad
from .scaling import Standardized, fit_standardized
from .svm import Kernel, SvmConvergenceError, SvmModel, dual_objective, fit_svm
from .tree import TreeModel, best_split, fit_tree, gini

__all__ = [
    "MARGIN", "PROBABILITY", "DimensionError", "Model", "predict",
    "DiscriminantModel", "fit_discriminant",
    "KnnModel", "fit_knn", "pairwise_distance",
    "LogisticModel", "fit_logistic", "log_likelihood", "log_likelihood_grad",
    "Standardized", "fit_standardized",
    "Kernel", "SvmConvergenceError", "SvmModel", "dual_objective", "fit_svm",
    "TreeModel", "best_split", "fit_tree", "gini",
]
