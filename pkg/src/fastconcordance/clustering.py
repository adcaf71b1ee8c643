"""Weighted Lloyd k-means producing :class:`WeightedClusterSet` summaries.

Both variants first collapse the input to its distinct points with integer
multiplicities; Lloyd on the weighted distinct points is the same algorithm
as Lloyd on the raw points, and it makes the "fewer distinct points than
clusters" case exact by construction.

In 1-D the nearest centroid is found by binary search over the midpoints of
the sorted centroids; in 2-D a KD-tree over the centroids is queried.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .core import EmptyInput, WeightedClusterSet


@dataclass(frozen=True)
class KMeansConfig:
    k: int
    max_iters: int = 50
    rel_tol: float = 1e-6
    seed: int = 0
    init: str = "kmeanspp"

    def __post_init__(self):
        if int(self.k) < 1:
            raise ValueError("k must be >= 1")
        if int(self.max_iters) < 1:
            raise ValueError("max_iters must be >= 1")
        if self.rel_tol < 0:
            raise ValueError("rel_tol must be >= 0")
        if self.init not in ("kmeanspp", "random_points"):
            raise ValueError(f"unknown init {self.init!r}")


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.SeedSequence):
        return np.random.default_rng(seed)
    return np.random.default_rng(np.random.SeedSequence(seed))


def _init_centers(x: np.ndarray, w: np.ndarray, k: int, init: str, rng) -> np.ndarray:
    """Initial centroids chosen among the distinct points ``x`` (shape (d, dim))."""
    prob = w / w.sum()
    if init == "random_points":
        idx = rng.choice(x.shape[0], size=k, replace=False, p=prob)
        return x[idx].copy()
    centers = np.empty((k, x.shape[1]))
    first = rng.choice(x.shape[0], p=prob)
    centers[0] = x[first]
    d2 = np.sum((x - centers[0]) ** 2, axis=1)
    for c in range(1, k):
        mass = w * d2
        total = mass.sum()
        if total <= 0:
            # fewer distinct locations than requested; callers guard against this
            idx = rng.choice(x.shape[0])
        else:
            cum = np.cumsum(mass)
            idx = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
            idx = min(idx, x.shape[0] - 1)
        centers[c] = x[idx]
        np.minimum(d2, np.sum((x - centers[c]) ** 2, axis=1), out=d2)
    return centers


def _assign_1d(x: np.ndarray, centers: np.ndarray) -> np.ndarray:
    order = np.argsort(centers, kind="stable")
    c_sorted = centers[order]
    mids = 0.5 * (c_sorted[1:] + c_sorted[:-1])
    return order[np.searchsorted(mids, x, side="left")]


def _assign_2d(x: np.ndarray, centers: np.ndarray) -> np.ndarray:
    _, idx = cKDTree(centers).query(x, k=1)
    return np.asarray(idx, dtype=np.intp)


def _lloyd(x: np.ndarray, w: np.ndarray, cfg: KMeansConfig, rng, assign):
    """Weighted Lloyd iterations on distinct points ``x`` (d, dim) with counts ``w``.

    Returns labels, the number of iterations run, whether the displacement
    criterion was met, and the SSE after each assignment step.
    """
    k = int(cfg.k)
    centers = _init_centers(x, w, k, cfg.init, rng)
    span = float(np.max(x.max(axis=0) - x.min(axis=0)))
    tol = cfg.rel_tol * span
    wf = w.astype(np.float64)
    history = []
    converged = False
    n_iter = 0
    labels = assign(x, centers)
    for n_iter in range(1, cfg.max_iters + 1):
        sizes = np.bincount(labels, weights=wf, minlength=k)
        new = np.empty_like(centers)
        for dim in range(x.shape[1]):
            s = np.bincount(labels, weights=wf * x[:, dim], minlength=k)
            with np.errstate(invalid="ignore", divide="ignore"):
                new[:, dim] = s / sizes
        empty = np.flatnonzero(sizes == 0)
        history.append(float(np.sum(wf * np.sum((x - centers[labels]) ** 2, axis=1))))
        if empty.size:
            # reseed each empty centroid at the point farthest from its current centroid
            dist = np.sum((x - new[labels]) ** 2, axis=1)
            far = np.argsort(-dist, kind="stable")[: empty.size]
            new[empty] = x[far]
        shift = float(np.max(np.sqrt(np.sum((new - centers) ** 2, axis=1))))
        centers = new
        labels = assign(x, centers)
        if empty.size == 0 and shift <= tol:
            converged = True
            break
    return labels, n_iter, converged, history


def _finish(x_orig: np.ndarray, w: np.ndarray, labels: np.ndarray, inverse: np.ndarray):
    k = int(labels.max()) + 1
    sizes = np.bincount(labels, weights=w, minlength=k).astype(np.int64)
    used = np.flatnonzero(sizes > 0)
    remap = np.full(k, -1, dtype=np.intp)
    remap[used] = np.arange(used.size)
    lab = remap[labels]
    cents = np.empty((used.size, x_orig.shape[1]))
    wf = w.astype(np.float64)
    for dim in range(x_orig.shape[1]):
        cents[:, dim] = np.bincount(lab, weights=wf * x_orig[:, dim], minlength=used.size) / sizes[used]
    return cents, sizes[used], lab[inverse]


def kmeans_1d(points, cfg: KMeansConfig) -> WeightedClusterSet:
    """Cluster scalar values; returns at most ``cfg.k`` non-empty clusters.

    When there are no more distinct values than ``k`` every distinct value
    becomes its own cluster, so the summary is lossless.
    """
    x = np.asarray(points, dtype=np.float64).reshape(-1)
    if x.size == 0:
        raise EmptyInput("cannot cluster an empty sequence")
    uniq, inverse, counts = np.unique(x, return_inverse=True, return_counts=True)
    inverse = inverse.reshape(-1)
    if uniq.size <= cfg.k:
        return WeightedClusterSet(uniq.copy(), counts, n_iter=0, converged=True, labels=inverse)
    rng = _rng(cfg.seed)
    xu = uniq[:, None]
    labels, n_iter, converged, history = _lloyd(
        xu, counts, cfg, rng, lambda pts, c: _assign_1d(pts[:, 0], c[:, 0])
    )
    cents, sizes, lab = _finish(xu, counts, labels, inverse)
    return WeightedClusterSet(cents[:, 0], sizes, n_iter=n_iter, converged=converged,
                              sse_history=tuple(history), labels=lab)


def kmeans_2d(points, cfg: KMeansConfig, standardize: bool = True) -> WeightedClusterSet:
    """Cluster (y, prediction) points jointly; centroids come back in original units.

    With ``standardize`` each coordinate is z-scored for the distance
    computation; a zero-variance coordinate is left unscaled.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.size == 0:
        raise EmptyInput("cannot cluster an empty sequence")
    pts = pts.reshape(-1, 2)
    uniq, inverse, counts = np.unique(pts, axis=0, return_inverse=True, return_counts=True)
    inverse = inverse.reshape(-1)
    if uniq.shape[0] <= cfg.k:
        return WeightedClusterSet(uniq.copy(), counts, n_iter=0, converged=True, labels=inverse)
    if standardize:
        mean = pts.mean(axis=0)
        sd = pts.std(axis=0)
        sd[sd == 0] = 1.0
        z = (uniq - mean) / sd
    else:
        z = uniq
    rng = _rng(cfg.seed)
    labels, n_iter, converged, history = _lloyd(z, counts, cfg, rng, _assign_2d)
    cents, sizes, lab = _finish(uniq, counts, labels, inverse)
    return WeightedClusterSet(cents, sizes, n_iter=n_iter, converged=converged,
                              sse_history=tuple(history), labels=lab)


def within_cluster_sse(points, clusters: WeightedClusterSet) -> float:
    """Sum of squared distances of the raw points to their assigned centroid."""
    pts = np.asarray(points, dtype=np.float64)
    cents = clusters.centroids
    if cents.ndim == 1:
        return float(np.sum((pts.reshape(-1) - cents[clusters.labels]) ** 2))
    return float(np.sum((pts.reshape(-1, 2) - cents[clusters.labels]) ** 2))
