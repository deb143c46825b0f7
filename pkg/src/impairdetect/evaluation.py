"""Cross-validation, confusion-matrix metrics, the leaderboard and plot-data tables."""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .dataset import Dataset, format_number
from .presets import DEFAULT_PRESETS, get_preset
from .rng import derive_seed, make_rng


@dataclass(frozen=True)
class FoldPlan:
    k: int
    assignments: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "assignments", tuple(int(a) for a in self.assignments))

    @property
    def n(self):
        return len(self.assignments)

    def fold_sizes(self) -> list[int]:
        return np.bincount(np.asarray(self.assignments, int), minlength=self.k).tolist()

    def split(self, fold):
        a = np.asarray(self.assignments)
        return np.flatnonzero(a != fold), np.flatnonzero(a == fold)


def stratified_kfold(ds: Dataset, k: int = 5, seed: int = 0, stratified: bool = True) -> FoldPlan:
    """Shuffle each class, lay the classes end to end and deal folds round-robin.

    Dealing one continuous sequence keeps both the overall and the per-class
    fold sizes within one of each other.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    y = ds.y
    rng = make_rng(seed, "evaluation.folds")
    if stratified:
        order = []
        for c in (0, 1):
            idx = np.flatnonzero(y == c)
            if len(idx) < k:
                raise ValueError(f"class {c} has {len(idx)} samples, fewer than k={k}")
            order.append(rng.permutation(idx))
        order = np.concatenate(order)
    else:
        if len(y) < k:
            raise ValueError(f"{len(y)} samples, fewer than k={k}")
        order = rng.permutation(len(y))
    assign = np.empty(len(y), dtype=int)
    assign[order] = np.arange(len(y)) % k
    return FoldPlan(k, tuple(assign))


@dataclass(frozen=True)
class ConfusionMatrix:
    """counts[true][predicted]."""

    counts: tuple[tuple[int, int], tuple[int, int]]

    @classmethod
    def from_labels(cls, truth, pred) -> "ConfusionMatrix":
        truth, pred = np.asarray(truth, int), np.asarray(pred, int)
        if truth.shape != pred.shape:
            raise ValueError("truth and predictions differ in length")
        m = np.zeros((2, 2), dtype=int)
        np.add.at(m, (truth, pred), 1)
        return cls(tuple(tuple(int(v) for v in row) for row in m))

    @property
    def array(self):
        return np.array(self.counts)

    @property
    def total(self):
        return int(self.array.sum())

    @property
    def accuracy(self):
        return float(np.trace(self.array) / self.total) if self.total else float("nan")

    def transpose(self) -> "ConfusionMatrix":
        m = self.array.T
        return ConfusionMatrix(tuple(tuple(int(v) for v in row) for row in m))

    def tpr_fnr(self) -> dict:
        """Per true class: (true positive rate, false negative rate)."""
        m = self.array
        out = {}
        for c in (0, 1):
            n = m[c].sum()
            out[c] = (m[c, c] / n, 1 - m[c, c] / n) if n else (math.nan, math.nan)
        return out

    def ppv_fdr(self) -> dict:
        """Per predicted class: (positive predictive value, false discovery rate)."""
        m = self.array
        out = {}
        for c in (0, 1):
            n = m[:, c].sum()
            out[c] = (m[c, c] / n, 1 - m[c, c] / n) if n else (math.nan, math.nan)
        return out


@dataclass
class EvalReport:
    classifier: str
    confusion: ConfusionMatrix
    predictions: np.ndarray
    scores: np.ndarray
    fold_accuracy: list = field(default_factory=list)
    fold_sizes: list = field(default_factory=list)
    rank: int | None = None
    winner: bool = False

    @property
    def accuracy(self):
        return self.confusion.accuracy

    @property
    def tpr_fnr(self):
        return self.confusion.tpr_fnr()

    @property
    def ppv_fdr(self):
        return self.confusion.ppv_fdr()

    def to_dict(self) -> dict:
        def rates(d):
            return {str(c): {"rate": _jsonable(a), "complement": _jsonable(b)} for c, (a, b) in d.items()}

        return {
            "classifier": self.classifier,
            "accuracy": self.accuracy,
            "accuracy_pct": round(100 * self.accuracy, 1),
            "rank": self.rank,
            "winner": self.winner,
            "confusion": [list(r) for r in self.confusion.counts],
            "tpr_fnr": rates(self.tpr_fnr),
            "ppv_fdr": rates(self.ppv_fdr),
            "fold_accuracy": self.fold_accuracy,
            "fold_sizes": self.fold_sizes,
            "predictions": [int(p) for p in self.predictions],
        }


def _jsonable(v):
    return None if isinstance(v, float) and math.isnan(v) else float(v)


class FoldError(RuntimeError):
    def __init__(self, fold, preset, cause):
        super().__init__(f"{preset}: fold {fold} failed: {cause}")
        self.fold = fold


def cross_validate(ds: Dataset, preset, plan: FoldPlan, seed: int = 0) -> EvalReport:
    """Fit on out-of-fold rows, predict the held-out fold, pool into one confusion matrix."""
    preset = get_preset(preset)
    if plan.n != len(ds):
        raise ValueError(f"fold plan covers {plan.n} rows but dataset has {len(ds)}")
    X, y = ds.X, ds.y
    pred = np.zeros(len(y), dtype=int)
    score = np.zeros(len(y))
    fold_acc, fold_sizes = [], []
    for fold in range(plan.k):
        train, test = plan.split(fold)
        try:
            model = preset(X[train], y[train], _fold_seed(seed, preset.name, fold))
            score[test] = model.scores(X[test])
            pred[test] = model.predict(X[test])
        except Exception as exc:
            raise FoldError(fold, preset.name, exc) from exc
        fold_sizes.append(len(test))
        fold_acc.append(float(np.mean(pred[test] == y[test])) if len(test) else float("nan"))
    return EvalReport(preset.name, ConfusionMatrix.from_labels(y, pred), pred, score, fold_acc, fold_sizes)


def _fold_seed(seed, name, fold):
    return derive_seed(seed, f"preset.{name}.fold{fold}")


def _cv_job(args):
    ds, name, plan, seed = args
    return cross_validate(ds, name, plan, seed)


def run_leaderboard(ds: Dataset, presets=DEFAULT_PRESETS, k: int = 5, seed: int = 0,
                    stratified: bool = True, jobs: int = 1) -> list[EvalReport]:
    """Evaluate every preset on one shared fold plan; reports keep input order and carry ranks."""
    presets = list(presets)
    if not presets:
        raise ValueError("no presets given")
    names = [get_preset(p).name for p in presets]
    ds.check_trainable()
    plan = stratified_kfold(ds, k, seed, stratified)
    jobs_args = [(ds, name, plan, seed) for name in names]
    if jobs > 1 and len(names) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            reports = list(ex.map(_cv_job, jobs_args))
    else:
        reports = [_cv_job(a) for a in jobs_args]
    # rank by accuracy, ties keep input order
    order = sorted(range(len(reports)), key=lambda i: (-round(reports[i].accuracy, 12), i))
    for r, i in enumerate(order, start=1):
        reports[i].rank = r
    reports[order[0]].winner = True
    return reports


def leaderboard_text(reports) -> str:
    width = max(len("Classifier"), *(len(r.classifier) for r in reports))
    lines = [f"{'Rank':>4}  {'Classifier':<{width}}  {'Accuracy (%)':>12}"]
    lines.append("-" * len(lines[0]))
    for r in reports:
        mark = "  *" if r.winner else ""
        lines.append(f"{r.rank:>4}  {r.classifier:<{width}}  {100 * r.accuracy:>12.1f}{mark}")
    return "\n".join(lines) + "\n"


def leaderboard_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["Classifier", "AccuracyPct"])
    for r in reports:
        w.writerow([r.classifier, f"{100 * r.accuracy:.1f}"])
    return buf.getvalue()


def export_scatter(ds: Dataset) -> list[tuple]:
    return [(s.bac, s.pulse_rate, s.target) for s in ds.samples]


def export_parallel_coords(ds: Dataset, predictions) -> list[tuple]:
    """Rows of (bac_norm, pulse_norm, target, correct) with each feature min-max scaled to [0, 1]."""
    predictions = np.asarray(predictions, int)
    if len(predictions) != len(ds):
        raise ValueError(f"{len(predictions)} predictions for {len(ds)} samples")
    X = ds.X
    lo, hi = X.min(axis=0), X.max(axis=0)
    span = np.where(hi > lo, hi - lo, 1.0)
    Z = (X - lo) / span
    y = ds.y
    return [(float(Z[i, 0]), float(Z[i, 1]), int(y[i]), int(predictions[i] == y[i])) for i in range(len(y))]


def table_csv(header, rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format_number(v) if isinstance(v, float) else str(v) for v in row))
    return "\n".join(lines) + "\n"


SCATTER_HEADER = ("BAC", "PulseRate", "Target")
PARALLEL_HEADER = ("BAC", "PulseRate", "Target", "Correct")
