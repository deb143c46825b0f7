"""Weighted CART trees with Gini splits, grown breadth-first up to a split budget."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .base import PROBABILITY, Model, as_matrix, check_xy


def gini(p1) -> np.ndarray:
    p1 = np.asarray(p1, dtype=float)
    return 2.0 * p1 * (1.0 - p1)


@dataclass
class Node:
    prob: float
    weight: float
    depth: int = 0
    feature: int = -1
    threshold: float = float("nan")
    left: "Node | None" = None
    right: "Node | None" = None

    @property
    def is_leaf(self):
        return self.left is None


@dataclass(frozen=True)
class Split:
    feature: int
    threshold: float
    gain: float


def best_split(X, y, w) -> Split | None:
    """Largest weighted Gini decrease over all (feature, midpoint) cuts.

    Gains are in absolute weight units: W*g(parent) - W_l*g(left) - W_r*g(right).
    Ties keep the lowest feature index, then the lowest threshold.
    """
    W = w.sum()
    if W <= 0:
        return None
    parent = W * gini((w * y).sum() / W)
    best = None
    for f in range(X.shape[1]):
        order = np.argsort(X[:, f], kind="stable")
        xs, ws, ys = X[order, f], w[order], y[order]
        wl = np.cumsum(ws)[:-1]
        w1l = np.cumsum(ws * ys)[:-1]
        wr = W - wl
        w1r = (ws * ys).sum() - w1l
        valid = (xs[1:] > xs[:-1]) & (wl > 0) & (wr > 0)
        if not valid.any():
            continue
        with np.errstate(divide="ignore", invalid="ignore"):
            child = wl * gini(w1l / wl) + wr * gini(w1r / wr)
        gain = np.where(valid, parent - child, -np.inf)
        i = int(np.argmax(gain))
        if best is None or gain[i] > best.gain:
            best = Split(f, 0.5 * (xs[i] + xs[i + 1]), float(gain[i]))
    if best is None or best.gain <= 1e-12 * W:
        return None
    return best


@dataclass
class TreeModel(Model):
    root: Node
    dim: int
    max_splits: int
    n_splits: int
    threshold: float = PROBABILITY

    def scores(self, X):
        X = as_matrix(X, self.dim)
        out = np.empty(len(X))
        stack = [(self.root, np.arange(len(X)))]
        while stack:
            node, idx = stack.pop()
            if node.is_leaf:
                out[idx] = node.prob
                continue
            go_left = X[idx, node.feature] <= node.threshold
            stack.append((node.left, idx[go_left]))
            stack.append((node.right, idx[~go_left]))
        return out

    def leaves(self):
        """Yield (lower, upper, prob) boxes; a point x is in a box when lower < x <= upper."""
        stack = [(self.root, np.full(self.dim, -np.inf), np.full(self.dim, np.inf))]
        while stack:
            node, lo, hi = stack.pop()
            if node.is_leaf:
                yield lo, hi, node.prob
                continue
            lhi = hi.copy()
            lhi[node.feature] = min(hi[node.feature], node.threshold)
            rlo = lo.copy()
            rlo[node.feature] = max(lo[node.feature], node.threshold)
            stack.append((node.left, lo, lhi))
            stack.append((node.right, rlo, hi))

    def internal_nodes(self):
        stack = [self.root]
        while stack:
            node = stack.pop()
            if not node.is_leaf:
                yield node
                stack.extend((node.left, node.right))


def fit_tree(X, y, max_splits: int = 100, sample_weight=None) -> TreeModel:
    X, y = check_xy(X, y)
    n = len(y)
    if sample_weight is None:
        w = np.full(n, 1.0 / n)
    else:
        w = np.asarray(sample_weight, dtype=float).ravel()
        if len(w) != n or not np.all(np.isfinite(w)) or (w < 0).any() or w.sum() <= 0:
            raise ValueError("sample weights must be finite, non-negative, one per row and not all zero")
    if max_splits < 0:
        raise ValueError("max_splits must be >= 0")

    def make(idx, depth):
        W = w[idx].sum()
        return Node(prob=float((w[idx] * y[idx]).sum() / W), weight=float(W), depth=depth)

    all_idx = np.arange(n)
    root = make(all_idx, 0)
    queue = deque([(root, all_idx)])
    n_splits = 0
    while queue and n_splits < max_splits:
        node, idx = queue.popleft()
        if node.prob in (0.0, 1.0):
            continue
        split = best_split(X[idx], y[idx], w[idx])
        if split is None:
            continue
        node.feature, node.threshold = split.feature, split.threshold
        go_left = X[idx, split.feature] <= split.threshold
        li, ri = idx[go_left], idx[~go_left]
        node.left, node.right = make(li, node.depth + 1), make(ri, node.depth + 1)
        n_splits += 1
        queue.append((node.left, li))
        queue.append((node.right, ri))
    return TreeModel(root=root, dim=X.shape[1], max_splits=max_splits, n_splits=n_splits)
