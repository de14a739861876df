"""Federated k-means clustering as total variation minimization over a device graph."""

from fedkmeans.data import FederatedDataset, generate_blobs, load_csv, partition
from fedkmeans.federation import (
    FederationConfig,
    FederationState,
    RoundMetrics,
    init_federation,
    run,
    run_round,
)
from fedkmeans.gtv import Discrepancy, discrepancy, gtv, gtvmin_objective
from fedkmeans.graph import DeviceGraph, build_topology, is_connected
from fedkmeans.kmeans import Explicit, Forgy, KMeansPP, assign, clustering_error, lloyd
from fedkmeans.local import LocalSolveReport, local_solve
from fedkmeans.metrics import ComparisonReport, compare

__all__ = [
    "ComparisonReport",
    "DeviceGraph",
    "Discrepancy",
    "Explicit",
    "FederatedDataset",
    "FederationConfig",
    "FederationState",
    "Forgy",
    "KMeansPP",
    "LocalSolveReport",
    "RoundMetrics",
    "assign",
    "build_topology",
    "clustering_error",
    "compare",
    "discrepancy",
    "generate_blobs",
    "gtv",
    "gtvmin_objective",
    "init_federation",
    "is_connected",
    "load_csv",
    "lloyd",
    "local_solve",
    "partition",
    "run",
    "run_round",
]
