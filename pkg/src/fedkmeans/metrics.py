"""Comparison of federated centroids against a centralized k-means baseline."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from fedkmeans.data import FederatedDataset
from fedkmeans.graph import DeviceGraph
from fedkmeans.gtv import discrepancy, edge_discrepancies
from fedkmeans.kmeans import assign, clustering_error

__all__ = ["ComparisonReport", "compare", "label_agreement"]


@dataclass
class ComparisonReport:
    centralized_objective: float
    per_device_objective_ratio: list[float]
    consensus_gap: float
    centroid_set_distance: list[float]
    label_agreement: list[float] | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def label_agreement(points: np.ndarray, labels: np.ndarray, centroids: np.ndarray) -> float:
    """Fraction of points whose cluster's majority ground-truth label is their own."""
    pred = assign(points, centroids)
    hits = 0
    for c in np.unique(pred):
        members = labels[pred == c]
        hits += int(np.bincount(members).max())
    return hits / len(points) if len(points) else 1.0


def _ratio(num: float, den: float) -> float:
    if den > 0:
        return num / den
    return 1.0 if num == 0 else math.inf


def compare(
    dataset: FederatedDataset,
    states,
    baseline: np.ndarray,
    g: DeviceGraph | None = None,
) -> ComparisonReport:
    """Score each device's centroids on the pooled data against ``baseline``.

    ``states`` is a sequence of per-device matrices (or a ``FederationState``).
    ``consensus_gap`` is the largest edge discrepancy of ``g``; without a
    graph every device pair is treated as an edge.
    """
    mats = list(getattr(states, "states", states))
    if len(mats) != dataset.n:
        raise ValueError(f"got {len(mats)} centroid matrices for {dataset.n} devices")
    pooled = dataset.pooled()
    central = clustering_error(pooled, baseline)
    if g is None:
        g = DeviceGraph.from_pairs(
            len(mats), [(i, j) for i in range(len(mats)) for j in range(i + 1, len(mats))]
        )
    gaps = edge_discrepancies(mats, g)
    truth = dataset.pooled_labels()
    return ComparisonReport(
        centralized_objective=central,
        per_device_objective_ratio=[_ratio(clustering_error(pooled, w), central) for w in mats],
        consensus_gap=max(gaps.values(), default=0.0),
        centroid_set_distance=[discrepancy(w, baseline).total for w in mats],
        label_agreement=(
            None
            if truth is None or truth.dtype.kind not in "iu" or len(pooled) == 0
            else [label_agreement(pooled, truth, w) for w in mats]
        ),
    )
