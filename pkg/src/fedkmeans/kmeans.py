"""Assignment, clustering error and Lloyd's method.

Centroid matrices are ``(k, d)`` arrays: one row per centroid. Row order
carries no meaning beyond bookkeeping.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np

__all__ = [
    "Explicit",
    "Forgy",
    "KMeansPP",
    "LloydResult",
    "assign",
    "best_of_lloyd",
    "cluster_sums",
    "clustering_error",
    "initial_centroids",
    "kmeans_plusplus",
    "lloyd",
    "sq_dists",
    "stop_iteration",
]

Seed = Union[int, Sequence[int], None]


@dataclass(frozen=True)
class KMeansPP:
    seed: Seed = 0


@dataclass(frozen=True)
class Forgy:
    """k distinct data points drawn uniformly without replacement."""

    seed: Seed = 0


@dataclass(frozen=True)
class Explicit:
    centroids: np.ndarray


Init = Union[KMeansPP, Forgy, Explicit]


class LloydResult(NamedTuple):
    centroids: np.ndarray
    labels: np.ndarray
    trace: list[float]


def _as_points(x, d: int | None = None) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1 and d is not None:
        x = x.reshape(-1, d)
    if x.ndim != 2:
        raise ValueError(f"expected a 2-d array of points, got shape {x.shape}")
    return x


def sq_dists(x: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Squared Euclidean distances, shape ``(len(x), len(w))``."""
    if x.shape[1] != w.shape[1]:
        raise ValueError(f"dimension mismatch: points have d={x.shape[1]}, centroids d={w.shape[1]}")
    diff = x[:, None, :] - w[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def assign(points, centroids) -> np.ndarray:
    """Index of the nearest centroid for each point; ties go to the lowest index."""
    w = _as_points(centroids)
    x = _as_points(points, w.shape[1])
    if len(w) == 0:
        raise ValueError("need at least one centroid")
    if len(x) == 0:
        return np.zeros(0, dtype=np.int64)
    return np.argmin(sq_dists(x, w), axis=1)


def clustering_error(points, centroids) -> float:
    """Sum over points of the squared distance to the nearest centroid."""
    w = _as_points(centroids)
    x = _as_points(points, w.shape[1])
    if len(w) == 0:
        raise ValueError("need at least one centroid")
    if len(x) == 0:
        return 0.0
    return float(sq_dists(x, w).min(axis=1).sum())


def cluster_sums(points: np.ndarray, labels: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-cluster coordinate sums and point counts."""
    sums = np.zeros((k, points.shape[1]))
    counts = np.zeros(k, dtype=np.int64)
    for c in range(k):
        members = points[labels == c]
        counts[c] = len(members)
        if counts[c]:
            sums[c] = members.sum(axis=0)
    return sums, counts


def stop_iteration(prev: float, cur: float, tol: float, relative: bool = True) -> bool:
    """True when the objective decreased by no more than ``tol`` (relative to ``prev``)."""
    threshold = tol * abs(prev) if relative else tol
    return prev - cur <= threshold


def kmeans_plusplus(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    x = _as_points(points)
    m = len(x)
    if m == 0:
        raise ValueError("k-means++ needs at least one point")
    chosen = [int(rng.integers(m))]
    closest = sq_dists(x, x[chosen]).ravel()
    for _ in range(1, k):
        total = closest.sum()
        if total > 0:
            idx = int(rng.choice(m, p=closest / total))
        else:
            # every point already coincides with a centroid
            idx = int(rng.integers(m))
        chosen.append(idx)
        closest = np.minimum(closest, sq_dists(x, x[idx : idx + 1]).ravel())
    return x[chosen].copy()


def initial_centroids(points: np.ndarray, k: int, init: Init) -> np.ndarray:
    x = _as_points(points)
    if isinstance(init, Explicit):
        w = _as_points(init.centroids, x.shape[1]).copy()
        if len(w) != k or w.shape[1] != x.shape[1]:
            raise ValueError(f"explicit init has shape {w.shape}, expected ({k}, {x.shape[1]})")
        return w
    if isinstance(init, Forgy):
        if k > len(x):
            raise ValueError(f"forgy init cannot pick {k} distinct points out of {len(x)}")
        rng = np.random.default_rng(init.seed)
        return x[rng.choice(len(x), size=k, replace=False)].copy()
    if isinstance(init, KMeansPP):
        return kmeans_plusplus(x, k, np.random.default_rng(init.seed))
    raise TypeError(f"unknown init {init!r}")


def lloyd(
    points,
    k: int,
    init: Init = KMeansPP(),
    max_iter: int = 50,
    tol: float = 1e-6,
    relative: bool = True,
) -> LloydResult:
    """Lloyd's alternating minimization for the k-means objective.

    ``trace[0]`` is the objective at the initial centroids and each later
    entry follows one assignment + update sweep. The loop stops once a sweep
    lowers the objective by at most ``tol`` (relative by default) or after
    ``max_iter`` sweeps; an unchanged assignment gives a zero decrease and
    therefore stops it too. Empty clusters keep their previous centroid.
    """
    x = _as_points(points)
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if len(x) == 0:
        raise ValueError("lloyd needs at least one point")
    w = initial_centroids(x, k, init)
    trace = [clustering_error(x, w)]
    for _ in range(max_iter):
        labels = assign(x, w)
        sums, counts = cluster_sums(x, labels, k)
        w = w.copy()
        nonempty = counts > 0
        w[nonempty] = sums[nonempty] / counts[nonempty, None]
        trace.append(clustering_error(x, w))
        if stop_iteration(trace[-2], trace[-1], tol, relative):
            break
    return LloydResult(w, assign(x, w), trace)


def best_of_lloyd(
    points,
    k: int,
    seed: int = 0,
    restarts: int = 10,
    max_iter: int = 50,
    tol: float = 1e-6,
) -> LloydResult:
    """Lowest-objective result over ``restarts`` k-means++ seeded runs.

    Restart ``r`` uses the seed sequence ``(seed, r)``.
    """
    best = None
    for r in range(restarts):
        res = lloyd(points, k, KMeansPP((seed, r)), max_iter=max_iter, tol=tol)
        if best is None or res.trace[-1] < best.trace[-1]:
            best = res
    if best is None:
        raise ValueError("restarts must be >= 1")
    return best
