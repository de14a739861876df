"""Centroid-set discrepancy, its graph total variation and the penalized objective."""

from __future__ import annotations

from collections.abc import Sequence
from typing import NamedTuple

import numpy as np

from fedkmeans.graph import DeviceGraph
from fedkmeans.kmeans import clustering_error, sq_dists

__all__ = ["Discrepancy", "discrepancy", "edge_discrepancies", "gtv", "gtvmin_objective"]


class Discrepancy(NamedTuple):
    """``term_I`` matches each row of the first matrix to its nearest row of
    the second; ``term_II`` does the reverse."""

    term_I: float
    term_II: float
    total: float


def discrepancy(wi, wj) -> Discrepancy:
    wi = np.asarray(wi, dtype=np.float64)
    wj = np.asarray(wj, dtype=np.float64)
    if wi.ndim != 2 or wi.shape != wj.shape:
        raise ValueError(f"centroid matrices must share (k, d); got {wi.shape} and {wj.shape}")
    dist = sq_dists(wi, wj)
    term_i = float(dist.min(axis=1).sum())
    term_ii = float(dist.min(axis=0).sum())
    return Discrepancy(term_i, term_ii, term_i + term_ii)


def _check_states(states: Sequence[np.ndarray], g: DeviceGraph) -> None:
    if len(states) != g.n:
        raise ValueError(f"got {len(states)} centroid matrices for {g.n} devices")


def edge_discrepancies(states: Sequence[np.ndarray], g: DeviceGraph) -> dict[tuple[int, int], float]:
    _check_states(states, g)
    return {(i, j): discrepancy(states[i], states[j]).total for i, j in g.sorted_edges()}


def gtv(states: Sequence[np.ndarray], g: DeviceGraph) -> float:
    """Sum of edge discrepancies, each undirected edge counted once."""
    return float(sum(edge_discrepancies(states, g).values()))


def gtvmin_objective(dataset, states: Sequence[np.ndarray], g: DeviceGraph, alpha: float) -> float:
    """Total local k-means loss plus ``alpha`` times the GTV of ``states``."""
    if alpha < 0:
        raise ValueError(f"alpha must be nonnegative, got {alpha}")
    if dataset.n != g.n:
        raise ValueError(f"dataset has {dataset.n} devices, graph has {g.n}")
    local = sum(clustering_error(x, w) for x, w in zip(dataset.locals, states))
    return float(local + alpha * gtv(states, g))
