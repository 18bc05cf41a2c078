"""Random forest, extra trees and gradient boosting on top of the tree core."""

from __future__ import annotations

import numpy as np

from .tree import Tree, TreeData, build_tree


def tree_rng(seed: int, index: int) -> np.random.Generator:
    """Position-based per-tree stream; independent of fitting order."""
    return np.random.default_rng([int(seed) & (2**64 - 1), index])


def fit_forest_trees(
    X: np.ndarray,
    y: np.ndarray,
    w: np.ndarray,
    n_estimators: int,
    seed: int,
    max_features: int | None,
    max_depth: int | None,
    bootstrap: bool,
) -> list[Tree]:
    data = TreeData(X)
    n = len(y)
    trees = []
    for t in range(n_estimators):
        rng = tree_rng(seed, t)
        wt = w
        if bootstrap:
            counts = np.bincount(rng.integers(0, n, size=n), minlength=n)
            wt = w * counts
            if not np.any(wt > 0):
                wt = w
        trees.append(
            build_tree(
                data,
                y,
                wt,
                rng,
                max_features=max_features,
                max_depth=max_depth,
                splitter="best" if bootstrap else "random",
            )
        )
    return trees


def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def _logit(p: float) -> float:
    p = min(max(p, 1e-12), 1 - 1e-12)
    return float(np.log(p / (1 - p)))


def fit_gbdt_trees(
    X: np.ndarray,
    y: np.ndarray,
    w: np.ndarray,
    kind: str,
    n_estimators: int,
    learning_rate: float,
    max_depth: int,
) -> tuple[float, list[Tree]]:
    """Stagewise boosting; returns (initial raw score, trees with Newton leaf values)."""
    y = np.asarray(y, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    data = TreeData(X)
    prior = float(w @ y / w.sum())
    init = _logit(prior) if kind == "classification" else prior
    F = np.full(len(y), init)
    trees: list[Tree] = []
    if learning_rate == 0:
        return init, trees
    for _ in range(n_estimators):
        if kind == "classification":
            p = _sigmoid(F)
            resid, hess = y - p, p * (1 - p)
        else:
            resid, hess = y - F, np.ones_like(y)
        tree = build_tree(data, resid, w, max_depth=max_depth, splitter="best")
        leaves = tree.apply(X)
        num = np.bincount(leaves, weights=w * resid, minlength=tree.n_nodes)
        den = np.bincount(leaves, weights=w * hess, minlength=tree.n_nodes)
        vals = np.where(den > 1e-12, num / np.where(den > 1e-12, den, 1.0), 0.0)
        tree = tree.with_values(vals)
        F = F + learning_rate * vals[leaves]
        trees.append(tree)
    return init, trees


def gbdt_raw(init: float, trees: list[Tree], learning_rate: float, X: np.ndarray) -> np.ndarray:
    F = np.full(X.shape[0], init)
    for tree in trees:
        F += learning_rate * tree.predict(X)
    return F
