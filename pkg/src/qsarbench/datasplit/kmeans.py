"""Mini-batch k-means with k-means++ seeding."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateError


@dataclass(frozen=True)
class KMeansResult:
    labels: np.ndarray
    centers: np.ndarray
    inertia: float


def _sq_dists(Y: np.ndarray, C: np.ndarray) -> np.ndarray:
    d = (Y * Y).sum(1)[:, None] - 2.0 * Y @ C.T + (C * C).sum(1)[None, :]
    return np.maximum(d, 0.0)


def kmeans_plus_plus(Y: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = len(Y)
    centers = [Y[rng.integers(n)]]
    closest = _sq_dists(Y, np.array(centers))[:, 0]
    for _ in range(1, k):
        total = closest.sum()
        if total <= 0:
            # every point already sits on a center
            idx = rng.integers(n)
        else:
            idx = int(np.searchsorted(np.cumsum(closest), rng.random() * total, side="right"))
            idx = min(idx, n - 1)
        centers.append(Y[idx])
        closest = np.minimum(closest, _sq_dists(Y, Y[idx : idx + 1])[:, 0])
    return np.array(centers)


def _assign(Y: np.ndarray, C: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    D = _sq_dists(Y, C)
    labels = D.argmin(1)
    return labels, D[np.arange(len(Y)), labels]


def _reseed_empty(Y: np.ndarray, C: np.ndarray) -> np.ndarray:
    """Move centers of empty clusters onto the points farthest from their centers."""
    C = C.copy()
    for _ in range(len(C)):
        labels, dist = _assign(Y, C)
        sizes = np.bincount(labels, minlength=len(C))
        empty = np.flatnonzero(sizes == 0)
        if len(empty) == 0:
            break
        order = np.argsort(-dist, kind="stable")
        # never steal the only member of a cluster
        taken = 0
        for idx in order:
            if taken == len(empty):
                break
            if sizes[labels[idx]] > 1:
                C[empty[taken]] = Y[idx]
                sizes[labels[idx]] -= 1
                taken += 1
        if taken == 0:
            break
    return C


def _single_run(Y, k, rng, batch_size, n_iter) -> KMeansResult:
    n = len(Y)
    C = kmeans_plus_plus(Y, k, rng)
    counts = np.zeros(k)
    bs = min(batch_size, n)
    for _ in range(n_iter):
        idx = rng.choice(n, size=bs, replace=False)
        batch = Y[idx]
        lab, _ = _assign(batch, C)
        # sequential 1/count updates within a batch reduce to a running mean
        m = np.bincount(lab, minlength=k).astype(np.float64)
        sums = np.zeros_like(C)
        np.add.at(sums, lab, batch)
        hit = m > 0
        new_counts = counts + m
        C[hit] = (counts[hit, None] * C[hit] + sums[hit]) / new_counts[hit, None]
        counts = new_counts
    C = _reseed_empty(Y, C)
    labels, dist = _assign(Y, C)
    return KMeansResult(labels, C, float(dist.sum()))


def minibatch_kmeans(
    Y: np.ndarray,
    k: int = 5,
    seed: int = 0,
    batch_size: int = 256,
    n_iter: int = 100,
    n_init: int = 3,
) -> KMeansResult:
    """Cluster rows of ``Y``; the lowest-inertia of ``n_init`` restarts wins.

    Raises:
        DegenerateError: if there are fewer rows than clusters.
    """
    Y = np.asarray(Y, dtype=np.float64)
    if len(Y) < k:
        raise DegenerateError(f"{len(Y)} points cannot form {k} clusters")
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(n_init):
        res = _single_run(Y, k, rng, batch_size, n_iter)
        if best is None or res.inertia < best.inertia - 1e-12:
            best = res
    return best
