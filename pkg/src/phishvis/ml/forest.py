"""Random forest of Gini CART trees.

Trees are grown to full depth on bootstrap resamples. At each node a random
batch of ``features_per_split`` features is scored; when none of them yields
a positive Gini gain, further batches are drawn from the remaining features
until one does (or the features run out). If every feature has been tried
and only zero-gain splits exist, the best of those is still taken so an
impure node never becomes a leaf while it can be split at all.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from ..errors import TrainingError

GAIN_EPS = 1e-12


@dataclass(frozen=True)
class RandomForestParams:
    n_trees: int = 100
    features_per_split: int | None = None  # default floor(log2(dim)) + 1
    max_depth: int | None = None
    bootstrap: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.n_trees < 1:
            raise ValueError("n_trees must be >= 1")
        if self.features_per_split is not None and self.features_per_split < 1:
            raise ValueError("features_per_split must be >= 1")
        if self.max_depth is not None and self.max_depth < 0:
            raise ValueError("max_depth must be >= 0")

    def mtry(self, dim: int) -> int:
        k = self.features_per_split or int(math.floor(math.log2(dim))) + 1
        return max(1, min(k, dim))

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class Tree:
    """Node arrays; ``feature[i] == -1`` marks a leaf whose class weights are ``value[i]``."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    @property
    def n_nodes(self) -> int:
        return self.feature.size

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Leaf index reached by each row of ``X``."""
        node = np.zeros(X.shape[0], dtype=np.int64)
        rows = np.arange(X.shape[0])
        active = self.feature[node] >= 0
        while active.any():
            idx = rows[active]
            cur = node[idx]
            go_left = X[idx, self.feature[cur]] <= self.threshold[cur]
            node[idx] = np.where(go_left, self.left[cur], self.right[cur])
            active[idx] = self.feature[node[idx]] >= 0
        return node

    def vote(self, X: np.ndarray) -> np.ndarray:
        """Class index voted by this tree for each row (ties to lowest index)."""
        return np.argmax(self.value[self.apply(X)], axis=1)


def _gini(counts: np.ndarray, n: np.ndarray) -> np.ndarray:
    with np.errstate(invalid="ignore", divide="ignore"):
        p = counts / n[..., None]
    return 1.0 - np.nansum(p * p, axis=-1)


def _best_split(Xn: np.ndarray, yn: np.ndarray, n_classes: int, parent_gini: float):
    """Best (gain, column, threshold) over the columns of ``Xn``, or None."""
    n, m = Xn.shape
    order = np.argsort(Xn, axis=0, kind="stable")
    xs = np.take_along_axis(Xn, order, axis=0)
    ys = yn[order]
    onehot = np.zeros((n, m, n_classes))
    np.put_along_axis(onehot, ys[..., None], 1.0, axis=2)
    left = np.cumsum(onehot, axis=0)[:-1]  # (n-1, m, K): first i+1 rows go left
    right = onehot.sum(axis=0)[None] - left

    n_left = np.arange(1, n, dtype=np.float64)[:, None]
    n_right = n - n_left
    impurity = (n_left * _gini(left, n_left) + n_right * _gini(right, n_right)) / n
    gain = parent_gini - impurity
    valid = xs[1:] > xs[:-1]
    if not valid.any():
        return None
    gain = np.where(valid, gain, -np.inf).T  # (m, n-1): first column, then lowest threshold
    flat = int(np.argmax(gain))
    col, pos = divmod(flat, n - 1)
    lo, hi = xs[pos, col], xs[pos + 1, col]
    thr = (lo + hi) / 2.0
    if not lo <= thr < hi:
        thr = lo
    return float(gain[col, pos]), col, float(thr)


def grow_tree(
    X: np.ndarray,
    y: np.ndarray,
    n_classes: int,
    mtry: int,
    rng: np.random.Generator,
    max_depth: int | None = None,
) -> Tree:
    feature, threshold, left, right, value = [], [], [], [], []

    def new_node(counts):
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(counts / counts.sum())
        return len(feature) - 1

    d = X.shape[1]
    root_counts = np.bincount(y, minlength=n_classes).astype(np.float64)
    stack = [(np.arange(X.shape[0]), 0, new_node(root_counts), root_counts)]
    while stack:
        idx, depth, node, counts = stack.pop()
        if np.count_nonzero(counts) <= 1 or idx.size < 2:
            continue
        if max_depth is not None and depth >= max_depth:
            continue
        parent_gini = float(_gini(counts, np.float64(idx.size)))
        order = rng.permutation(d)
        best = None
        for start in range(0, d, mtry):
            cols = order[start : start + mtry]
            found = _best_split(X[np.ix_(idx, cols)], y[idx], n_classes, parent_gini)
            if found is not None and (best is None or found[0] > best[0]):
                best = (found[0], int(cols[found[1]]), found[2])
            if best is not None and best[0] > GAIN_EPS:
                break
        if best is None:
            continue
        _, f, thr = best
        mask = X[idx, f] <= thr
        li, ri = idx[mask], idx[~mask]
        lc = np.bincount(y[li], minlength=n_classes).astype(np.float64)
        rc = np.bincount(y[ri], minlength=n_classes).astype(np.float64)
        feature[node], threshold[node] = f, thr
        left[node], right[node] = new_node(lc), new_node(rc)
        stack.append((ri, depth + 1, right[node], rc))
        stack.append((li, depth + 1, left[node], lc))

    return Tree(
        np.array(feature, dtype=np.int64),
        np.array(threshold, dtype=np.float64),
        np.array(left, dtype=np.int64),
        np.array(right, dtype=np.int64),
        np.array(value, dtype=np.float64).reshape(-1, n_classes),
    )


def fit_forest(X: np.ndarray, y: np.ndarray, n_classes: int, p: RandomForestParams) -> list[Tree]:
    n, d = X.shape
    if n == 0:
        raise TrainingError("cannot train a forest on an empty table")
    mtry = p.mtry(d)
    trees = []
    for child in np.random.SeedSequence(p.seed).spawn(p.n_trees):
        rng = np.random.default_rng(child)
        rows = rng.integers(0, n, n) if p.bootstrap else np.arange(n)
        trees.append(grow_tree(X[rows], y[rows], n_classes, mtry, rng, p.max_depth))
    return trees


def pack_trees(trees: Sequence[Tree]) -> dict[str, np.ndarray]:
    """Concatenate trees into flat arrays with per-tree node offsets."""
    offsets = np.cumsum([0] + [t.n_nodes for t in trees]).astype(np.int64)
    return {
        "tree_offsets": offsets,
        "feature": np.concatenate([t.feature for t in trees]),
        "threshold": np.concatenate([t.threshold for t in trees]),
        "left": np.concatenate([t.left for t in trees]),
        "right": np.concatenate([t.right for t in trees]),
        "value": np.concatenate([t.value for t in trees]),
    }


def unpack_trees(arrays: dict[str, np.ndarray]) -> list[Tree]:
    off = arrays["tree_offsets"]
    return [
        Tree(*(arrays[k][a:b] for k in ("feature", "threshold", "left", "right", "value")))
        for a, b in zip(off[:-1], off[1:])
    ]


def forest_scores(trees: Sequence[Tree], X: np.ndarray, n_classes: int) -> np.ndarray:
    """Fraction of trees voting for each class, shape ``(rows, n_classes)``."""
    votes = np.zeros((X.shape[0], n_classes))
    rows = np.arange(X.shape[0])
    for t in trees:
        votes[rows, t.vote(X)] += 1.0
    return votes / len(trees)
