"""Experiment pipeline: config -> data -> graph -> federation -> artifacts.

A run directory holds ``config.resolved``, ``rounds.jsonl``, ``centroids.csv``
and ``report.json``. Nothing time- or host-dependent is written, so repeated
runs of one config produce identical files.
"""

from __future__ import annotations

import csv
import json
import logging
from pathlib import Path

import numpy as np

from fedkmeans.config import ConfigError, ExperimentConfig, dump_config
from fedkmeans.data import FederatedDataset, default_label_map, generate_blobs, load_csv, partition
from fedkmeans.federation import FederationConfig, SolverConfig, init_federation, run
from fedkmeans.graph import DeviceGraph, build_topology, connected_random, is_connected, read_edge_list
from fedkmeans.kmeans import Explicit, LloydResult, best_of_lloyd, lloyd
from fedkmeans.metrics import compare

__all__ = ["build_dataset", "build_graph", "run_baseline", "run_experiment", "run_sweep"]

log = logging.getLogger(__name__)


def build_dataset(cfg: ExperimentConfig) -> FederatedDataset:
    if cfg.data == "csv":
        try:
            if cfg.csv_device_column:
                return load_csv(cfg.csv_path, device_column=True, skip_header=cfg.csv_skip_header)
            points = load_csv(cfg.csv_path, skip_header=cfg.csv_skip_header)
        except ValueError as exc:
            raise ConfigError("csv_path", str(exc)) from None
        labels = None
    else:
        points, labels = generate_blobs(
            cfg.blobs_k,
            cfg.blobs_d,
            spread=cfg.blobs_spread,
            points_per_center=cfg.blobs_points,
            seed=cfg.seed,
            separation=cfg.blobs_separation,
        )
        if len(points) == 0:
            raise ConfigError("blobs_points", "synthetic dataset is empty")
    n = cfg.n_devices
    if cfg.partition == "iid":
        return partition(points, n, "iid", seed=cfg.seed, labels=labels)
    if cfg.partition == "contiguous":
        return partition(points, n, "contiguous", labels=labels)
    if cfg.label_map is None:
        label_map = default_label_map(cfg.blobs_k, n)
    else:
        label_map = {
            int(lab): [v - 1 for v in (devs if isinstance(devs, list) else [devs])]
            for lab, devs in cfg.label_map.items()
        }
    return partition(points, n, "by_label", labels=labels, label_map=label_map)


def build_graph(cfg: ExperimentConfig, n: int) -> tuple[DeviceGraph, dict]:
    """Graph for ``n`` devices plus provenance (the seed used for random graphs)."""
    kind, _, arg = cfg.graph.partition(":")
    info: dict = {"spec": cfg.graph}
    if kind == "random":
        seed = cfg.seed if cfg.graph_seed is None else cfg.graph_seed
        g, used = connected_random(n, float(arg), seed, cfg.graph_max_tries)
        info["seed_used"] = used
    elif kind == "file":
        g = read_edge_list(arg, n)
    else:
        g = build_topology(kind, n)
    info["connected"] = is_connected(g)
    info["edges"] = [[i + 1, j + 1] for i, j in g.sorted_edges()]
    if not info["connected"]:
        log.warning("device graph %s is disconnected; devices in different components "
                    "cannot reach a common centroid set", cfg.graph)
    return g, info


def _baseline(cfg: ExperimentConfig, points: np.ndarray) -> LloydResult:
    if len(points) == 0:
        raise ConfigError("data", "dataset is empty")
    if cfg.init == "explicit":
        w0 = np.asarray(cfg.init_centroids, dtype=np.float64)
        return lloyd(points, cfg.k, Explicit(w0), cfg.inner_max_iter, cfg.inner_tol)
    return best_of_lloyd(
        points, cfg.k, seed=cfg.seed, restarts=cfg.baseline_restarts,
        max_iter=cfg.inner_max_iter, tol=cfg.inner_tol,
    )


def _write_json(path: Path, obj) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def run_experiment(cfg: ExperimentConfig) -> dict:
    """Run the federated method and write the run directory. Returns the report."""
    cfg.validate()
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    dataset = build_dataset(cfg)
    g, graph_info = build_graph(cfg, dataset.n)
    resolved = cfg.replace(n_devices=dataset.n)
    if "seed_used" in graph_info:
        resolved = resolved.replace(graph_seed=graph_info["seed_used"])
    dump_config(resolved, out / "config.resolved")

    fed = FederationConfig(
        k=cfg.k,
        alpha=cfg.alpha,
        rounds_max=cfg.rounds_max,
        round_tol=cfg.round_tol,
        mode=cfg.mode.replace("-", "_"),
        seed=cfg.seed,
        init="shared" if cfg.init == "explicit" else cfg.init,
        solver=SolverConfig(cfg.inner_max_iter, cfg.inner_tol),
    )
    state0 = init_federation(
        dataset, cfg.k, fed.init, cfg.seed,
        centroids=None if cfg.init != "explicit" else np.asarray(cfg.init_centroids, dtype=np.float64),
        solver=fed.solver,
    )
    state, history = run(dataset, g, fed, state0)

    with open(out / "rounds.jsonl", "w") as fh:
        for m in history:
            fh.write(json.dumps(m.to_dict()) + "\n")
    with open(out / "centroids.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        for i, w in enumerate(state.states):
            for c, row in enumerate(w):
                writer.writerow([state.round, i + 1, c + 1, *map(repr, row.tolist())])

    base = _baseline(cfg, dataset.pooled())
    comparison = compare(dataset, state, base.centroids, g)
    report = {
        "comparison": comparison.to_dict(),
        "baseline_centroids": base.centroids.tolist(),
        "rounds": len(history),
        "final_objective": history[-1].objective,
        "final_gtv": history[-1].gtv,
        "graph": graph_info,
        "n_devices": dataset.n,
        "local_sizes": dataset.sizes,
    }
    _write_json(out / "report.json", report)
    return report


def run_baseline(cfg: ExperimentConfig) -> dict:
    """Centralized Lloyd on the pooled data; writes centroids and objective."""
    cfg.validate()
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    dataset = build_dataset(cfg)
    dump_config(cfg.replace(n_devices=dataset.n), out / "config.resolved")
    res = _baseline(cfg, dataset.pooled())
    with open(out / "centroids.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in res.centroids:
            writer.writerow(list(map(repr, row.tolist())))
    report = {
        "objective": res.trace[-1],
        "trace": res.trace,
        "centroids": res.centroids.tolist(),
        "m": dataset.m,
    }
    _write_json(out / "report.json", report)
    return report


def run_sweep(
    cfg: ExperimentConfig,
    alphas: list[float] | None = None,
    graphs: list[str] | None = None,
) -> list[dict]:
    """One :func:`run_experiment` per sweep point in ``out/<point>/`` plus ``summary.csv``."""
    if not alphas and not graphs:
        raise ConfigError("sweep", "give alpha values or topologies to sweep over")
    points = []
    for a in alphas or []:
        points.append((f"alpha-{a!r}", cfg.replace(alpha=float(a))))
    for spec in graphs or []:
        name = spec.replace(":", "-").replace("/", "_")
        points.append((f"graph-{name}", cfg.replace(graph=spec)))
    root = Path(cfg.out)
    rows = []
    for name, point_cfg in points:
        point_cfg = point_cfg.replace(out=str(root / name))
        report = run_experiment(point_cfg)
        rows.append({
            "point": name,
            "alpha": point_cfg.alpha,
            "graph": point_cfg.graph,
            "objective": report["final_objective"],
            "gtv": report["final_gtv"],
            "consensus_gap": report["comparison"]["consensus_gap"],
        })
    with open(root / "summary.csv", "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
        writer.writeheader()
        for row in rows:
            writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
    if alphas:
        by_alpha = sorted((r for r in rows if r["point"].startswith("alpha-")), key=lambda r: r["alpha"])
        gaps = [r["consensus_gap"] for r in by_alpha]
        if any(b > a for a, b in zip(gaps, gaps[1:])):
            log.warning("consensus gap is not monotone in alpha across the sweep: %s", gaps)
    return rows
