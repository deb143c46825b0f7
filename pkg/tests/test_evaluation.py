import numpy as np
import pytest
from hypothesis import given, strategies as st

from impairdetect.classifiers.base import PROBABILITY, Model
from impairdetect.dataset import Dataset, GeneratorConfig, generate_synthetic
from impairdetect.evaluation import (ConfusionMatrix, FoldError, cross_validate, export_parallel_coords,
                                     export_scatter, leaderboard_csv, leaderboard_text, run_leaderboard,
                                     stratified_kfold)
from impairdetect.presets import DEFAULT_PRESETS, Preset, get_preset

PRESET_NAMES = [
    "Fine Tree", "Medium Tree", "Coarse Tree", "Linear Discriminant", "Quadratic Discriminant",
    "Logistic Regression", "Linear SVM", "Quadratic SVM", "Cubic SVM", "Fine Gaussian SVM",
    "Medium Gaussian SVM", "Coarse Gaussian SVM", "Fine KNN", "Medium KNN", "Coarse KNN",
    "Cosine KNN", "Cubic KNN", "Weighted KNN", "Boosted Trees", "Baged Trees",
    "Subspace Discriminant", "Subspace KNN", "RUSBoosted Trees",
]


class Constant(Model):
    threshold = PROBABILITY

    def __init__(self, value):
        self.value = value
        self.dim = 2

    def scores(self, X):
        return np.full(len(np.atleast_2d(X)), float(self.value))


ALWAYS_ONE = Preset("Always One", "constant", lambda X, y, seed: Constant(1))


def random_dataset(seed, n0=None, n1=None):
    rng = np.random.default_rng(seed)
    n0 = n0 or int(rng.integers(5, 60))
    n1 = n1 or int(rng.integers(5, 60))
    X = np.abs(rng.normal(size=(n0 + n1, 2)))
    y = np.r_[np.zeros(n0, int), np.ones(n1, int)]
    perm = rng.permutation(n0 + n1)
    return Dataset.from_arrays(X[perm], y[perm])


def test_fold_sizes_199(default_population):
    plan = stratified_kfold(default_population, 5, seed=0)
    assert sorted(plan.fold_sizes(), reverse=True) == [40, 40, 40, 40, 39]


def test_five_per_class_one_each():
    ds = random_dataset(0, 5, 5)
    plan = stratified_kfold(ds, 5, seed=3)
    y = ds.y
    for f in range(5):
        _, test = plan.split(f)
        assert sorted(y[test]) == [0, 1]


def test_stratification_sweep():
    for seed in range(100):
        ds = random_dataset(seed)
        k = int(np.random.default_rng(seed).integers(2, 6))
        plan = stratified_kfold(ds, k, seed=seed)
        a = np.asarray(plan.assignments)
        assert sum(plan.fold_sizes()) == len(ds)
        assert max(plan.fold_sizes()) - min(plan.fold_sizes()) <= 1
        for c in (0, 1):
            counts = np.bincount(a[ds.y == c], minlength=k)
            assert counts.max() - counts.min() <= 1, seed


def test_class_smaller_than_k():
    with pytest.raises(ValueError):
        stratified_kfold(random_dataset(0, 3, 10), 5)


def test_always_one_classifier():
    ds = random_dataset(1, 20, 30)
    r = cross_validate(ds, ALWAYS_ONE, stratified_kfold(ds, 5, 0))
    assert r.accuracy == pytest.approx(0.6)
    assert r.tpr_fnr[1] == (1.0, 0.0) and r.tpr_fnr[0] == (0.0, 1.0)
    assert r.ppv_fdr[1][0] == pytest.approx(0.6)
    assert np.isnan(r.ppv_fdr[0][0])


def test_small_confusion_example():
    cm = ConfusionMatrix.from_labels([1, 0, 0, 1], [1, 1, 0, 0])
    assert cm.counts == ((1, 1), (1, 1))
    assert cm.accuracy == 0.5
    for rates in (cm.tpr_fnr(), cm.ppv_fdr()):
        assert all(v == (0.5, 0.5) for v in rates.values())


@given(st.lists(st.tuples(st.integers(0, 1), st.integers(0, 1)), min_size=1, max_size=50))
def test_label_swap_transposes(pairs):
    t, p = np.array(pairs).T
    cm = ConfusionMatrix.from_labels(t, p)
    assert ConfusionMatrix.from_labels(p, t) == cm.transpose()
    assert cm.total == len(pairs)
    assert cm.accuracy == pytest.approx(np.mean(t == p))


def check_identities(report):
    for rate, comp in list(report.tpr_fnr.values()) + list(report.ppv_fdr.values()):
        if not np.isnan(rate):
            assert abs(rate + comp - 1) < 1e-12


@pytest.mark.parametrize("name", ["Medium Tree", "Logistic Regression", "Weighted KNN", "Boosted Trees"])
def test_pooled_accuracy_is_size_weighted_mean(name, default_population):
    plan = stratified_kfold(default_population, 5, seed=2)
    r = cross_validate(default_population, name, plan, seed=2)
    # recompute every fold from scratch
    correct = 0
    for f in range(5):
        train, test = plan.split(f)
        X, y = default_population.X, default_population.y
        model = get_preset(name)(X[train], y[train], 0)
        correct += int((model.predict(X[test]) == y[test]).sum())
    weighted = sum(a * n for a, n in zip(r.fold_accuracy, r.fold_sizes)) / sum(r.fold_sizes)
    assert r.accuracy == pytest.approx(weighted, abs=1e-12)
    assert r.accuracy == pytest.approx(correct / len(default_population), abs=1e-12)
    check_identities(r)


def test_fold_error_names_fold():
    def boom(X, y, seed):
        raise RuntimeError("nope")
    ds = random_dataset(2, 10, 10)
    with pytest.raises(FoldError, match="fold 0"):
        cross_validate(ds, Preset("Boom", "x", boom), stratified_kfold(ds, 5))


def test_default_presets_match_table():
    assert list(DEFAULT_PRESETS) == PRESET_NAMES


def test_alias_and_unknown():
    assert get_preset("Bagged Trees").name == "Baged Trees"
    with pytest.raises(KeyError, match="unknown preset"):
        get_preset("Deep Forest")


def test_single_row_leaderboard(default_population):
    reports = run_leaderboard(default_population, ["Boosted Trees"], seed=7)
    assert len(reports) == 1 and reports[0].rank == 1 and reports[0].winner
    assert leaderboard_csv(reports).splitlines()[0] == "Classifier,AccuracyPct"


@pytest.mark.slow
def test_full_leaderboard_deterministic(default_population):
    a = run_leaderboard(default_population, seed=7)
    b = run_leaderboard(default_population, seed=7, jobs=2)
    assert [r.classifier for r in a] == PRESET_NAMES
    assert leaderboard_text(a) == leaderboard_text(b)
    assert leaderboard_csv(a) == leaderboard_csv(b)
    assert sorted(r.rank for r in a) == list(range(1, 24))
    assert sum(r.winner for r in a) == 1
    for r in a:
        check_identities(r)
        assert r.confusion.total == len(default_population)


def test_scatter_is_verbatim():
    ds = Dataset.from_arrays([[0.1, 2.5], [0.0, 0.35]], [1, 0])
    assert export_scatter(ds) == [(0.1, 2.5, 1), (0.0, 0.35, 0)]


def test_parallel_coords():
    ds = generate_synthetic(GeneratorConfig(n_normal=30, n_induced=30, seed=2))
    rows = export_parallel_coords(ds, ds.y)
    assert all(r[3] == 1 for r in rows)
    Z = np.array([r[:2] for r in rows])
    X = ds.X
    for j in range(2):
        assert Z[X[:, j].argmin(), j] == 0.0 and Z[X[:, j].argmax(), j] == 1.0
        assert Z[:, j].min() == 0.0 and Z[:, j].max() == 1.0
    flipped = export_parallel_coords(ds, 1 - ds.y)
    assert all(r[3] == 0 for r in flipped)
    with pytest.raises(ValueError):
        export_parallel_coords(ds, ds.y[:-1])


def test_constant_feature_normalises_to_zero():
    ds = Dataset.from_arrays([[0, 1], [0, 2]], [0, 1])
    assert [r[0] for r in export_parallel_coords(ds, [0, 1])] == [0.0, 0.0]
