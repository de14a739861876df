"""Undirected device graphs.

Devices are indexed ``0..n-1`` inside the library. Edge-list files and the
CLI use 1-based device ids; conversion happens only at those boundaries.
"""

from __future__ import annotations

import itertools
from collections import deque
from collections.abc import Iterable
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "DeviceGraph",
    "build_topology",
    "connected_random",
    "is_connected",
    "read_edge_list",
    "write_edge_list",
]


@dataclass(frozen=True)
class DeviceGraph:
    """Undirected simple graph over ``n`` devices.

    ``edges`` holds each link once as a sorted pair ``(i, j)`` with ``i < j``.
    """

    n: int
    edges: frozenset[tuple[int, int]] = frozenset()
    _adj: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"a device graph needs n >= 1, got {self.n}")
        normalized = set()
        for i, j in self.edges:
            i, j = int(i), int(j)
            if i == j:
                raise ValueError(f"self-loop at device {i}")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise ValueError(f"edge ({i}, {j}) references a device outside [0, {self.n})")
            normalized.add((min(i, j), max(i, j)))
        object.__setattr__(self, "edges", frozenset(normalized))
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for i, j in normalized:
            adj[i].append(j)
            adj[j].append(i)
        object.__setattr__(self, "_adj", tuple(tuple(sorted(a)) for a in adj))

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[tuple[int, int]]) -> DeviceGraph:
        return cls(n, frozenset((int(i), int(j)) for i, j in pairs))

    def neighbourhood(self, i: int) -> tuple[int, ...]:
        """Neighbours of device ``i`` in ascending order."""
        self._check(i)
        return self._adj[i]

    def degree(self, i: int) -> int:
        self._check(i)
        return len(self._adj[i])

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def _check(self, i: int) -> None:
        if not 0 <= i < self.n:
            raise ValueError(f"device {i} outside [0, {self.n})")


def build_topology(
    kind: str,
    n: int,
    *,
    p: float | None = None,
    seed: int | None = None,
    edges: Iterable[tuple[int, int]] | None = None,
) -> DeviceGraph:
    """Construct a ring, complete, Erdos-Renyi ``random`` or ``edge_list`` graph.

    ``random`` draws each of the ``n(n-1)/2`` possible edges independently
    with probability ``p`` from a generator seeded by ``seed``. It does not
    enforce connectivity; see :func:`connected_random`.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if kind == "ring":
        if n == 1:
            pairs: list[tuple[int, int]] = []
        elif n == 2:
            pairs = [(0, 1)]
        else:
            pairs = [(i, (i + 1) % n) for i in range(n)]
    elif kind == "complete":
        pairs = list(itertools.combinations(range(n), 2))
    elif kind == "random":
        if p is None or not 0.0 <= p <= 1.0:
            raise ValueError(f"random topology needs 0 <= p <= 1, got {p}")
        rng = np.random.default_rng(seed)
        candidates = list(itertools.combinations(range(n), 2))
        draws = rng.random(len(candidates))
        pairs = [e for e, u in zip(candidates, draws) if u < p]
    elif kind == "edge_list":
        if edges is None:
            raise ValueError("edge_list topology needs edges")
        pairs = list(edges)
    else:
        raise ValueError(f"unknown topology kind {kind!r}")
    return DeviceGraph.from_pairs(n, pairs)


def connected_random(
    n: int, p: float, seed: int, max_tries: int = 100
) -> tuple[DeviceGraph, int]:
    """Sample G(n, p) graphs with seeds ``seed, seed+1, ...`` until one is connected.

    Returns the graph and the seed that produced it.
    """
    for attempt in range(max_tries):
        g = build_topology("random", n, p=p, seed=seed + attempt)
        if is_connected(g):
            return g, seed + attempt
    raise RuntimeError(
        f"no connected G({n}, {p}) sample within {max_tries} tries starting at seed {seed}"
    )


def is_connected(g: DeviceGraph) -> bool:
    seen = {0}
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for j in g.neighbourhood(i):
            if j not in seen:
                seen.add(j)
                queue.append(j)
    return len(seen) == g.n


def read_edge_list(path: str | Path, n: int | None = None) -> DeviceGraph:
    """Parse a whitespace-separated edge-list file with 1-based device ids.

    Lines that are blank or start with ``#`` are skipped. When ``n`` is not
    given it is taken as the largest id in the file.
    """
    pairs = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            parts = text.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected two device ids, got {text!r}")
            try:
                i, j = int(parts[0]), int(parts[1])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: non-integer device id in {text!r}") from None
            if i < 1 or j < 1:
                raise ValueError(f"{path}:{lineno}: device ids are 1-based, got {text!r}")
            pairs.append((i - 1, j - 1))
    if n is None:
        n = max((max(e) for e in pairs), default=0) + 1
    return DeviceGraph.from_pairs(n, pairs)


def write_edge_list(g: DeviceGraph, path: str | Path) -> None:
    with open(path, "w") as fh:
        fh.write(f"# n={g.n}\n")
        for i, j in g.sorted_edges():
            fh.write(f"{i + 1} {j + 1}\n")
