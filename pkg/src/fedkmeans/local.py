"""Per-device solver for the penalized k-means subproblem.

A device holds its points ``x`` and centroids ``w`` and sees frozen copies of
its neighbours' centroid matrices (the *snapshot*). It minimizes

    sum_s min_c |x_s - w_c|^2 + alpha * sum_j disc(w, v_j)

over ``w`` by alternating four steps: nearest-centroid assignment of local
points, matching of every neighbour centroid to its nearest local centroid
(table ``a``), matching of every local centroid to its nearest centroid at
each neighbour (table ``b``), and an exact closed-form centroid update with
all of the above held fixed.

The ``star`` switch drops the table-``b`` term from both the update and the
objective. With ``alpha == 1`` the subproblem then equals plain k-means on
the local points augmented by all neighbour centroids; the switch exists to
check that equivalence.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from fedkmeans.gtv import discrepancy
from fedkmeans.kmeans import assign, cluster_sums, clustering_error, stop_iteration

__all__ = [
    "LocalSolveReport",
    "frozen_objective",
    "local_solve",
    "m_step",
    "match_local_to_neighbors",
    "match_neighbors_to_local",
    "surrogate",
]


@dataclass
class LocalSolveReport:
    centroids: np.ndarray
    inner_iterations: int
    surrogate_trace: list[float] = field(default_factory=list)


def _snapshot(w: np.ndarray, snapshot: Sequence[np.ndarray]) -> list[np.ndarray]:
    out = []
    for v in snapshot:
        v = np.asarray(v, dtype=np.float64)
        if v.shape != w.shape:
            raise ValueError(f"neighbour centroids have shape {v.shape}, local {w.shape}")
        out.append(v)
    return out


def match_neighbors_to_local(w, snapshot: Sequence[np.ndarray]) -> np.ndarray:
    """``a[j, c']``: local centroid nearest to centroid ``c'`` of neighbour ``j``."""
    w = np.asarray(w, dtype=np.float64)
    snap = _snapshot(w, snapshot)
    if not snap:
        return np.zeros((0, len(w)), dtype=np.int64)
    return np.stack([assign(v, w) for v in snap])


def match_local_to_neighbors(w, snapshot: Sequence[np.ndarray]) -> np.ndarray:
    """``b[j, c]``: centroid of neighbour ``j`` nearest to local centroid ``c``."""
    w = np.asarray(w, dtype=np.float64)
    snap = _snapshot(w, snapshot)
    if not snap:
        return np.zeros((0, len(w)), dtype=np.int64)
    return np.stack([assign(w, v) for v in snap])


def m_step(
    points,
    w,
    snapshot: Sequence[np.ndarray],
    labels: np.ndarray,
    a: np.ndarray,
    b: np.ndarray,
    alpha: float,
    *,
    star: bool = True,
) -> np.ndarray:
    """Closed-form minimizer of the subproblem with assignments and matchings fixed.

    Centroid ``c`` becomes

        (sum of its points + alpha * (matched neighbour centroids)) /
        (its point count + alpha * (number of matched neighbour centroids))

    where the matched neighbour centroids are those with ``a == c`` plus, per
    neighbour, the one selected by ``b[:, c]``. A centroid with a zero
    denominator keeps its current position.
    """
    if alpha < 0:
        raise ValueError(f"alpha must be nonnegative, got {alpha}")
    w = np.asarray(w, dtype=np.float64)
    x = np.asarray(points, dtype=np.float64).reshape(-1, w.shape[1])
    snap = _snapshot(w, snapshot)
    k = len(w)
    sums, counts = cluster_sums(x, labels, k)
    new = w.copy()
    coupled = alpha > 0 and len(snap) > 0
    for c in range(k):
        num = sums[c]
        den = counts[c]
        if coupled:
            nb_sum = np.zeros(w.shape[1])
            nb_cnt = 0
            for j, v in enumerate(snap):
                hits = a[j] == c
                nb_cnt += int(hits.sum())
                if hits.any():
                    nb_sum = nb_sum + v[hits].sum(axis=0)
                if star:
                    nb_sum = nb_sum + v[b[j, c]]
                    nb_cnt += 1
            num = num + alpha * nb_sum
            den = den + alpha * nb_cnt
        if den > 0:
            new[c] = num / den
    return new


def frozen_objective(
    points,
    w,
    snapshot: Sequence[np.ndarray],
    labels: np.ndarray,
    a: np.ndarray,
    b: np.ndarray,
    alpha: float,
    *,
    star: bool = True,
) -> float:
    """Subproblem objective with assignments and matchings held fixed."""
    w = np.asarray(w, dtype=np.float64)
    x = np.asarray(points, dtype=np.float64).reshape(-1, w.shape[1])
    val = float(((x - w[labels]) ** 2).sum())
    for j, v in enumerate(np.asarray(s, dtype=np.float64) for s in snapshot):
        pen = ((v - w[a[j]]) ** 2).sum()
        if star:
            pen += ((w - v[b[j]]) ** 2).sum()
        val += alpha * float(pen)
    return val


def surrogate(points, w, snapshot: Sequence[np.ndarray], alpha: float, *, star: bool = True) -> float:
    """Local loss plus ``alpha`` times the discrepancy to every neighbour."""
    w = np.asarray(w, dtype=np.float64)
    val = clustering_error(np.asarray(points, dtype=np.float64).reshape(-1, w.shape[1]), w)
    if alpha > 0:
        for v in snapshot:
            dis = discrepancy(w, v)
            val += alpha * (dis.total if star else dis.term_II)
    return val


def local_solve(
    points,
    w_init,
    snapshot: Sequence[np.ndarray],
    alpha: float,
    max_iter: int = 50,
    tol: float = 1e-6,
    relative: bool = True,
    *,
    star: bool = True,
) -> LocalSolveReport:
    """Iterate assignment, both matchings and the centroid update.

    Stopping follows :func:`fedkmeans.kmeans.lloyd`: a sweep that lowers the
    subproblem objective by at most ``tol`` ends the loop, as does
    ``max_iter``. With no neighbours or ``alpha == 0`` the iterates coincide
    with Lloyd's method on the local points.
    """
    if alpha < 0:
        raise ValueError(f"alpha must be nonnegative, got {alpha}")
    if max_iter < 1:
        raise ValueError(f"max_iter must be >= 1, got {max_iter}")
    w = np.array(w_init, dtype=np.float64)
    if w.ndim != 2:
        raise ValueError(f"centroids must be a (k, d) array, got shape {w.shape}")
    x = np.asarray(points, dtype=np.float64).reshape(-1, w.shape[1])
    snap = _snapshot(w, snapshot)
    trace = [surrogate(x, w, snap, alpha, star=star)]
    it = 0
    while it < max_iter:
        it += 1
        labels = assign(x, w)
        a = match_neighbors_to_local(w, snap)
        b = match_local_to_neighbors(w, snap)
        w = m_step(x, w, snap, labels, a, b, alpha, star=star)
        trace.append(surrogate(x, w, snap, alpha, star=star))
        if stop_iteration(trace[-2], trace[-1], tol, relative):
            break
    return LocalSolveReport(w, it, trace)
