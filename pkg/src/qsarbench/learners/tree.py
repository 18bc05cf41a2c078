"""Weighted CART trees with best or random thresholds.

A single squared-error criterion serves both tasks: for 0/1 targets the
weighted sum of squared errors equals half the weighted Gini impurity, so the
chosen splits are the same.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

GAIN_RTOL = 1e-12


@dataclass(frozen=True)
class Tree:
    feature: np.ndarray  # -1 marks a leaf
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    def apply(self, X: np.ndarray) -> np.ndarray:
        node = np.zeros(X.shape[0], dtype=np.int64)
        active = np.flatnonzero(self.feature[node] >= 0)
        while len(active):
            cur = node[active]
            f = self.feature[cur]
            go_right = X[active, f] > self.threshold[cur]
            node[active] = np.where(go_right, self.right[cur], self.left[cur])
            active = active[self.feature[node[active]] >= 0]
        return node

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.value[self.apply(X)]

    def with_values(self, value: np.ndarray) -> "Tree":
        return Tree(self.feature, self.threshold, self.left, self.right, np.asarray(value, dtype=np.float64))

    def to_dict(self) -> dict:
        return {
            "feature": [int(v) for v in self.feature],
            "threshold": [float(v) for v in self.threshold],
            "left": [int(v) for v in self.left],
            "right": [int(v) for v in self.right],
            "value": [float(v) for v in self.value],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Tree":
        return cls(
            np.asarray(d["feature"], dtype=np.int64),
            np.asarray(d["threshold"], dtype=np.float64),
            np.asarray(d["left"], dtype=np.int64),
            np.asarray(d["right"], dtype=np.int64),
            np.asarray(d["value"], dtype=np.float64),
        )


class TreeData:
    """Training matrix prepared once and shared by every tree of an ensemble."""

    def __init__(self, X: np.ndarray, features: np.ndarray | None = None):
        X = np.asarray(X)
        self.X = X
        self.n, self.p = X.shape
        if features is None:
            features = np.flatnonzero(X.max(0) != X.min(0)) if self.n else np.arange(0)
        self.features = np.asarray(features, dtype=np.int64)
        Xf = X[:, self.features]
        binary = np.all((Xf == 0) | (Xf == 1), axis=0)
        self.bin_feat = self.features[binary]
        self.cont_feat = self.features[~binary]
        self.Xb = sp.csr_matrix(X[:, self.bin_feat].astype(np.float64))
        self.Xc = np.asarray(X[:, self.cont_feat], dtype=np.float64)


def _sse(W, S, Q):
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(W > 0, Q - S * S / np.where(W > 0, W, 1.0), 0.0)


def _binary_stats(data: TreeData, idx: np.ndarray, wi: np.ndarray, yi: np.ndarray):
    """Count and weighted sums over rows with a set bit, for every binary feature."""
    indptr, indices = data.Xb.indptr, data.Xb.indices
    starts = indptr[idx]
    lens = indptr[idx + 1] - starts
    total = int(lens.sum())
    nb = len(data.bin_feat)
    if total == 0:
        z = np.zeros(nb)
        return z, z, z, z
    offsets = np.cumsum(lens) - lens
    pos = np.repeat(starts - offsets, lens) + np.arange(total)
    cols = indices[pos]
    local = np.repeat(np.arange(len(idx)), lens)
    wl, yl = wi[local], yi[local]
    cnt = np.bincount(cols, minlength=nb)
    Wr = np.bincount(cols, weights=wl, minlength=nb)
    Sr = np.bincount(cols, weights=wl * yl, minlength=nb)
    Qr = np.bincount(cols, weights=wl * yl * yl, minlength=nb)
    return cnt, Wr, Sr, Qr


def _node_candidates(data: TreeData, idx: np.ndarray, wi: np.ndarray, yi: np.ndarray):
    """Per-node non-constant binary and continuous features (positions into bin/cont lists)."""
    m = len(idx)
    cnt, Wr, Sr, Qr = _binary_stats(data, idx, wi, yi)
    bin_ok = np.flatnonzero((cnt > 0) & (cnt < m))
    sub = (Wr, Sr, Qr)
    xc = data.Xc[idx]
    if xc.shape[1]:
        lo, hi = xc.min(0), xc.max(0)
        cont_ok = np.flatnonzero(hi > lo)
    else:
        lo = hi = np.zeros(0)
        cont_ok = np.zeros(0, dtype=np.int64)
    return sub, bin_ok, xc, lo, hi, cont_ok


def _best_continuous(x, y, w, W, S, Q):
    order = np.argsort(x, kind="stable")
    xs, ws, ys = x[order], w[order], y[order]
    cw, cs, cq = np.cumsum(ws), np.cumsum(ws * ys), np.cumsum(ws * ys * ys)
    pos = np.flatnonzero(xs[:-1] < xs[1:])
    if len(pos) == 0:
        return -np.inf, 0.0
    Wl, Sl, Ql = cw[pos], cs[pos], cq[pos]
    child = _sse(Wl, Sl, Ql) + _sse(W - Wl, S - Sl, Q - Ql)
    j = int(np.argmin(child))
    t = 0.5 * (xs[pos[j]] + xs[pos[j] + 1])
    if not t < xs[pos[j] + 1]:
        t = xs[pos[j]]
    return -child[j], t


def build_tree(
    data: TreeData,
    y: np.ndarray,
    w: np.ndarray,
    rng: np.random.Generator | None = None,
    max_features: int | None = None,
    max_depth: int | None = None,
    splitter: str = "best",
) -> Tree:
    """Grow one tree on rows with positive weight.

    ``splitter="random"`` draws one uniform threshold per candidate feature
    between its node minimum and maximum; ``"best"`` scans every threshold.
    Nodes split until pure, out of non-constant features, or at ``max_depth``.
    """
    y = np.asarray(y, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    if splitter == "random" and rng is None:
        raise ValueError("random splitter needs an rng")
    feature, threshold, left, right, value = [], [], [], [], []

    def new_node(idx) -> int:
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        wi = w[idx]
        value.append(float(wi @ y[idx] / wi.sum()))
        return len(feature) - 1

    root_idx = np.flatnonzero(w > 0)
    if len(root_idx) == 0:
        raise ValueError("no sample carries positive weight")
    stack = [(new_node(root_idx), root_idx, 0)]
    nb = len(data.bin_feat)
    while stack:
        node, idx, depth = stack.pop()
        yi = y[idx]
        if len(idx) < 2 or (max_depth is not None and depth >= max_depth) or yi.min() == yi.max():
            continue
        wi = w[idx]
        sub, bin_ok, xc, lo, hi, cont_ok = _node_candidates(data, idx, wi, yi)
        cand = np.concatenate([bin_ok, nb + cont_ok])
        if len(cand) == 0:
            continue
        if max_features is not None and max_features < len(cand):
            cand = np.sort(rng.choice(cand, size=max_features, replace=False))
        cb, cc = cand[cand < nb], cand[cand >= nb] - nb
        wy, wyy = wi * yi, wi * yi * yi
        W, S, Q = wi.sum(), wy.sum(), wyy.sum()
        if splitter == "random":
            tb = rng.uniform(0.0, 1.0, size=len(cb)) if len(cb) else np.zeros(0)
            tc = rng.uniform(lo[cc], hi[cc]) if len(cc) else np.zeros(0)
            # guard against a draw landing exactly on the maximum
            tc = np.where(tc >= hi[cc], lo[cc], tc)
        gains = np.empty(len(cand))
        thresholds = np.empty(len(cand))
        if len(cb):
            Wr, Sr, Qr = sub[0][cb], sub[1][cb], sub[2][cb]
            gains[: len(cb)] = -(_sse(Wr, Sr, Qr) + _sse(W - Wr, S - Sr, Q - Qr))
            thresholds[: len(cb)] = tb if splitter == "random" else 0.5
        if len(cc) and splitter == "random":
            M = (xc[:, cc] > tc).astype(np.float64)
            Wr, Sr, Qr = wi @ M, wy @ M, wyy @ M
            gains[len(cb) :] = -(_sse(Wr, Sr, Qr) + _sse(W - Wr, S - Sr, Q - Qr))
            thresholds[len(cb) :] = tc
        elif len(cc):
            for n_i, f in enumerate(cc):
                k = len(cb) + n_i
                gains[k], thresholds[k] = _best_continuous(xc[:, f], yi, wi, W, S, Q)
        top = gains.max()
        if not np.isfinite(top):
            continue
        j = int(np.flatnonzero(gains >= top - GAIN_RTOL * max(abs(top), 1e-300))[0])
        c = int(cand[j])
        f_global = int(data.bin_feat[c]) if c < nb else int(data.cont_feat[c - nb])
        t = float(thresholds[j])
        col = data.X[idx, f_global]
        go_right = col > t
        li, ri = idx[~go_right], idx[go_right]
        if len(li) == 0 or len(ri) == 0:
            continue
        feature[node], threshold[node] = f_global, t
        left[node] = new_node(li)
        right[node] = new_node(ri)
        stack.append((right[node], ri, depth + 1))
        stack.append((left[node], li, depth + 1))

    return Tree(
        np.asarray(feature, dtype=np.int64),
        np.asarray(threshold, dtype=np.float64),
        np.asarray(left, dtype=np.int64),
        np.asarray(right, dtype=np.int64),
        np.asarray(value, dtype=np.float64),
    )
