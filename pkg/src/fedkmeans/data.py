"""Synthetic data, CSV ingestion and partitioning into local datasets."""

from __future__ import annotations

import csv
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "FederatedDataset",
    "default_label_map",
    "generate_blobs",
    "load_csv",
    "partition",
]


@dataclass(frozen=True)
class FederatedDataset:
    """Local datasets of ``n`` devices.

    ``locals[i]`` is an ``(m_i, d)`` array. ``origin[i]`` records, for each
    local point, its row in the pooled input it came from (when known) and
    ``labels[i]`` the ground-truth blob labels (when known).
    """

    locals: tuple[np.ndarray, ...]
    d: int
    origin: tuple[np.ndarray, ...] | None = None
    labels: tuple[np.ndarray, ...] | None = None

    def __post_init__(self) -> None:
        if not self.locals:
            raise ValueError("a federated dataset needs at least one device")
        arrs = []
        for i, x in enumerate(self.locals):
            x = np.asarray(x, dtype=np.float64).reshape(-1, self.d)
            if not np.all(np.isfinite(x)):
                raise ValueError(f"device {i} holds non-finite coordinates")
            x.setflags(write=False)
            arrs.append(x)
        object.__setattr__(self, "locals", tuple(arrs))

    @property
    def n(self) -> int:
        return len(self.locals)

    @property
    def sizes(self) -> list[int]:
        return [len(x) for x in self.locals]

    @property
    def m(self) -> int:
        return sum(self.sizes)

    def pooled(self) -> np.ndarray:
        """Concatenate local datasets in device order."""
        return np.concatenate(self.locals, axis=0)

    def pooled_labels(self) -> np.ndarray | None:
        if self.labels is None:
            return None
        return np.concatenate(self.labels)


def _default_centers(k: int, d: int, separation: float) -> np.ndarray:
    # Regular k-gon in the first two coordinates with adjacent centers
    # `separation` apart; a line when d == 1.
    centers = np.zeros((k, d))
    if k == 1:
        return centers
    if d == 1:
        centers[:, 0] = separation * np.arange(k)
        return centers
    radius = separation / (2.0 * math.sin(math.pi / k))
    angles = 2.0 * math.pi * np.arange(k) / k
    centers[:, 0] = radius * np.cos(angles)
    centers[:, 1] = radius * np.sin(angles)
    return centers


def generate_blobs(
    k_true: int,
    d: int,
    *,
    spread: float,
    points_per_center: int,
    seed: int | Sequence[int] | None = 0,
    centers: Sequence[Sequence[float]] | np.ndarray | None = None,
    separation: float = 10.0,
) -> tuple[np.ndarray, np.ndarray]:
    """Isotropic Gaussian blobs.

    Points are grouped by center: the first ``points_per_center`` rows belong
    to center 0, and so on. Without explicit ``centers`` the blob means sit on
    a regular polygon whose adjacent vertices are ``separation`` apart.

    Returns
    -------
    points : ndarray, shape (k_true * points_per_center, d)
    labels : ndarray of int, 0-based center index of each point
    """
    if k_true < 1 or d < 1:
        raise ValueError(f"need k_true >= 1 and d >= 1, got k_true={k_true}, d={d}")
    if not spread > 0:
        raise ValueError(f"spread must be positive, got {spread}")
    if points_per_center < 0:
        raise ValueError("points_per_center must be nonnegative")
    if centers is None:
        mu = _default_centers(k_true, d, separation)
    else:
        rows = [list(map(float, c)) for c in centers]
        if len(rows) != k_true:
            raise ValueError(f"expected {k_true} centers, got {len(rows)}")
        if any(len(r) != d for r in rows):
            raise ValueError(f"all centers must have dimension {d}")
        mu = np.array(rows, dtype=np.float64).reshape(k_true, d)
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal((k_true, points_per_center, d))
    points = (mu[:, None, :] + spread * noise).reshape(-1, d)
    labels = np.repeat(np.arange(k_true), points_per_center)
    return points, labels


def default_label_map(num_labels: int, n: int) -> dict[int, list[int]]:
    """Spread labels over devices.

    With at least as many devices as labels, label ``j`` goes to every device
    ``i`` with ``i % num_labels == j``. Otherwise devices are reused
    cyclically.
    """
    if n >= num_labels:
        return {j: [i for i in range(n) if i % num_labels == j] for j in range(num_labels)}
    return {j: [j % n] for j in range(num_labels)}


def partition(
    points: np.ndarray,
    n: int,
    strategy: str = "contiguous",
    *,
    seed: int | None = None,
    labels: np.ndarray | None = None,
    label_map: Mapping[object, int | Sequence[int]] | None = None,
    sizes: Sequence[int] | None = None,
) -> FederatedDataset:
    """Split pooled points over ``n`` devices.

    Strategies: ``contiguous`` (consecutive near-equal chunks), ``iid``
    (seeded shuffle, then contiguous chunks), ``sizes`` (consecutive chunks
    of the given sizes) and ``by_label``. For ``by_label`` each label maps to
    one device or to a list of devices, in which case that label's points are
    dealt round-robin over the list. Device indices are 0-based.
    """
    x = np.asarray(points, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError(f"points must be a 2-d array, got shape {x.shape}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    m = len(x)
    if labels is not None:
        labels = np.asarray(labels)
        if len(labels) != m:
            raise ValueError("labels and points differ in length")

    if strategy == "contiguous":
        groups = np.array_split(np.arange(m), n)
    elif strategy == "iid":
        perm = np.random.default_rng(seed).permutation(m)
        groups = [np.sort(g) for g in np.array_split(perm, n)]
    elif strategy == "sizes":
        if sizes is None or len(sizes) != n:
            raise ValueError(f"sizes strategy needs {n} sizes")
        if any(s < 0 for s in sizes) or sum(sizes) != m:
            raise ValueError(f"sizes {list(sizes)} do not sum to {m} points")
        bounds = np.cumsum([0, *sizes])
        groups = [np.arange(bounds[i], bounds[i + 1]) for i in range(n)]
    elif strategy == "by_label":
        if labels is None:
            raise ValueError("by_label partition needs labels")
        if label_map is None:
            uniq = sorted(set(labels.tolist()))
            label_map = {u: devs for u, devs in zip(uniq, default_label_map(len(uniq), n).values())}
        buckets: list[list[int]] = [[] for _ in range(n)]
        dealt: dict[object, int] = {}
        for s, lab in enumerate(labels.tolist()):
            if lab not in label_map:
                raise ValueError(f"label {lab!r} missing from label_map")
            target = label_map[lab]
            devs = [target] if isinstance(target, (int, np.integer)) else list(target)
            if not devs or any(not 0 <= dev < n for dev in devs):
                raise ValueError(f"label {lab!r} maps to devices {devs} outside [0, {n})")
            c = dealt.get(lab, 0)
            buckets[devs[c % len(devs)]].append(s)
            dealt[lab] = c + 1
        groups = [np.array(b, dtype=np.int64) for b in buckets]
    else:
        raise ValueError(f"unknown partition strategy {strategy!r}")

    groups = [np.asarray(g, dtype=np.int64) for g in groups]
    return FederatedDataset(
        locals=tuple(x[g] for g in groups),
        d=x.shape[1],
        origin=tuple(groups),
        labels=None if labels is None else tuple(labels[g] for g in groups),
    )


def load_csv(
    path: str | Path,
    *,
    device_column: bool = False,
    skip_header: bool = False,
    n: int | None = None,
) -> FederatedDataset | np.ndarray:
    """Read comma-separated feature rows.

    With ``device_column`` the first column is a 1-based device id and a
    :class:`FederatedDataset` is returned (``n`` defaults to the largest id).
    Otherwise the pooled ``(m, d)`` array is returned for :func:`partition`.
    """
    rows: list[list[float]] = []
    devices: list[int] = []
    width = None
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        for rowno, row in enumerate(reader, start=1):
            if skip_header and rowno == 1:
                continue
            if not row or all(not cell.strip() for cell in row):
                continue
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise ValueError(f"{path}: row {rowno} has {len(row)} columns, expected {width}")
            cells = row
            if device_column:
                try:
                    dev = int(row[0])
                except ValueError:
                    raise ValueError(f"{path}: row {rowno}: bad device id {row[0]!r}") from None
                if dev < 1:
                    raise ValueError(f"{path}: row {rowno}: device ids are 1-based, got {dev}")
                devices.append(dev - 1)
                cells = row[1:]
            try:
                values = [float(c) for c in cells]
            except ValueError:
                raise ValueError(f"{path}: row {rowno}: non-numeric feature in {row!r}") from None
            if not all(math.isfinite(v) for v in values):
                raise ValueError(f"{path}: row {rowno}: non-finite feature in {row!r}")
            rows.append(values)
    if not rows or not rows[0]:
        raise ValueError(f"{path}: no feature data; dimension undetermined")
    x = np.array(rows, dtype=np.float64)
    if not device_column:
        return x
    dev_arr = np.array(devices, dtype=np.int64)
    n_dev = int(dev_arr.max()) + 1 if n is None else n
    if dev_arr.max() >= n_dev:
        raise ValueError(f"{path}: device id {dev_arr.max() + 1} exceeds n={n_dev}")
    groups = [np.flatnonzero(dev_arr == i) for i in range(n_dev)]
    return FederatedDataset(
        locals=tuple(x[g] for g in groups), d=x.shape[1], origin=tuple(groups)
    )
