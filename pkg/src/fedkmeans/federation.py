"""Round-based simulation of the federated method.

Every round each device solves its local subproblem against frozen copies of
its neighbours' centroids. In ``jacobi`` mode all devices read the state from
the start of the round; in ``gauss_seidel`` mode devices update in ascending
order and later devices see the new centroids of earlier ones.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import asdict, dataclass, field

import numpy as np

from fedkmeans.data import FederatedDataset
from fedkmeans.graph import DeviceGraph
from fedkmeans.gtv import edge_discrepancies
from fedkmeans.kmeans import Explicit, clustering_error, kmeans_plusplus, lloyd
from fedkmeans.local import local_solve

__all__ = [
    "FederationConfig",
    "FederationState",
    "RoundMetrics",
    "SolverConfig",
    "compute_metrics",
    "device_seed",
    "init_federation",
    "run",
    "run_round",
]

log = logging.getLogger(__name__)

MODES = ("jacobi", "gauss_seidel")
INITS = ("kmeanspp", "local_lloyd", "shared", "explicit")


@dataclass(frozen=True)
class FederationState:
    round: int
    states: tuple[np.ndarray, ...]

    @property
    def n(self) -> int:
        return len(self.states)


@dataclass(frozen=True)
class SolverConfig:
    max_iter: int = 50
    tol: float = 1e-6
    relative: bool = True


@dataclass(frozen=True)
class FederationConfig:
    k: int
    alpha: float
    rounds_max: int = 30
    round_tol: float = 1e-6
    mode: str = "jacobi"
    seed: int = 0
    init: str = "kmeanspp"
    solver: SolverConfig = field(default_factory=SolverConfig)

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.alpha < 0:
            raise ValueError(f"alpha must be nonnegative, got {self.alpha}")
        if self.rounds_max < 1:
            raise ValueError(f"rounds_max must be >= 1, got {self.rounds_max}")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.init not in INITS:
            raise ValueError(f"init must be one of {INITS}, got {self.init!r}")


@dataclass
class RoundMetrics:
    round: int
    objective: float
    local_loss_sum: float
    gtv: float
    max_edge_discrepancy: float
    per_device_pooled_error: list[float]
    inner_iterations: list[int]

    def to_dict(self) -> dict:
        return asdict(self)


def device_seed(seed: int, i: int) -> tuple[int, int]:
    """Seed sequence used for device ``i``'s k-means++ draw."""
    return (seed, i)


def init_federation(
    dataset: FederatedDataset,
    k: int,
    init: str = "kmeanspp",
    seed: int = 0,
    centroids: np.ndarray | Sequence[np.ndarray] | None = None,
    solver: SolverConfig | None = None,
) -> FederationState:
    """Initial centroids for every device.

    ``kmeanspp`` runs k-means++ on each device's own points with seed
    :func:`device_seed`; a device without points falls back to the shared
    matrix. ``local_lloyd`` additionally runs Lloyd's method on each device's
    points from that draw (stopping rule from ``solver``), so devices start
    from their own local k-means solutions. ``shared`` gives every device the
    same k-means++ draw over the pooled points (or ``centroids`` when that is
    a single ``(k, d)`` matrix).
    ``explicit`` takes one matrix per device from ``centroids``.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    n, d = dataset.n, dataset.d

    def shared() -> np.ndarray:
        if centroids is not None:
            w = np.asarray(centroids, dtype=np.float64)
            if w.shape != (k, d):
                raise ValueError(f"shared init needs a ({k}, {d}) matrix, got {w.shape}")
            return w.copy()
        return kmeans_plusplus(dataset.pooled(), k, np.random.default_rng(seed))

    if init == "explicit":
        if centroids is None or len(centroids) != n:
            raise ValueError(f"explicit init needs {n} centroid matrices")
        states = []
        for i, w in enumerate(centroids):
            w = np.array(w, dtype=np.float64)
            if w.shape != (k, d):
                raise ValueError(f"device {i}: expected shape ({k}, {d}), got {w.shape}")
            states.append(w)
    elif init == "shared":
        w0 = shared()
        states = [w0.copy() for _ in range(n)]
    elif init in ("kmeanspp", "local_lloyd"):
        solver = solver or SolverConfig()
        states = []
        fallback = None
        for i, x in enumerate(dataset.locals):
            if len(x) >= 1:
                w = kmeans_plusplus(x, k, np.random.default_rng(device_seed(seed, i)))
                if init == "local_lloyd":
                    w = lloyd(x, k, Explicit(w), solver.max_iter, solver.tol, solver.relative).centroids
                states.append(w)
            else:
                if fallback is None:
                    fallback = shared()
                log.info("device %d has no points; using the shared initial centroids", i + 1)
                states.append(fallback.copy())
    else:
        raise ValueError(f"unknown init strategy {init!r}")
    return FederationState(0, tuple(states))


def compute_metrics(
    dataset: FederatedDataset,
    states: Sequence[np.ndarray],
    g: DeviceGraph,
    alpha: float,
    round: int,
    inner_iterations: Sequence[int] = (),
) -> RoundMetrics:
    local = float(sum(clustering_error(x, w) for x, w in zip(dataset.locals, states)))
    edges = edge_discrepancies(states, g)
    total = float(sum(edges.values()))
    pooled = dataset.pooled()
    return RoundMetrics(
        round=round,
        objective=local + alpha * total,
        local_loss_sum=local,
        gtv=total,
        max_edge_discrepancy=max(edges.values(), default=0.0),
        per_device_pooled_error=[clustering_error(pooled, w) for w in states],
        inner_iterations=list(inner_iterations),
    )


def run_round(
    state: FederationState,
    dataset: FederatedDataset,
    g: DeviceGraph,
    alpha: float,
    solver: SolverConfig = SolverConfig(),
    mode: str = "jacobi",
) -> tuple[FederationState, RoundMetrics]:
    if state.n != g.n or dataset.n != g.n:
        raise ValueError(f"state ({state.n}), dataset ({dataset.n}) and graph ({g.n}) disagree on n")
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    frozen = [w.copy() for w in state.states]
    current = list(state.states)
    iters = []
    for i in range(g.n):
        source = frozen if mode == "jacobi" else current
        snapshot = [source[j].copy() for j in g.neighbourhood(i)]
        rep = local_solve(
            dataset.locals[i],
            state.states[i],
            snapshot,
            alpha,
            max_iter=solver.max_iter,
            tol=solver.tol,
            relative=solver.relative,
        )
        current[i] = rep.centroids
        iters.append(rep.inner_iterations)
    new = FederationState(state.round + 1, tuple(current))
    return new, compute_metrics(dataset, new.states, g, alpha, new.round, iters)


def run(
    dataset: FederatedDataset,
    g: DeviceGraph,
    config: FederationConfig,
    state: FederationState | None = None,
) -> tuple[FederationState, list[RoundMetrics]]:
    """Run rounds until the objective settles or ``rounds_max`` is reached.

    The objective has settled once its relative change stays within
    ``round_tol`` for two consecutive rounds. Changes are taken in absolute
    value because simultaneous (Jacobi) updates may increase it.
    """
    if state is None:
        state = init_federation(dataset, config.k, config.init, config.seed, solver=config.solver)
    prev = compute_metrics(dataset, state.states, g, config.alpha, state.round).objective
    history: list[RoundMetrics] = []
    quiet = 0
    for _ in range(config.rounds_max):
        state, metrics = run_round(state, dataset, g, config.alpha, config.solver, config.mode)
        history.append(metrics)
        cur = metrics.objective
        quiet = quiet + 1 if abs(prev - cur) <= config.round_tol * abs(prev) else 0
        prev = cur
        if quiet >= 2:
            break
    return state, history
