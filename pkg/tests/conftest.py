import itertools

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def brute_force_kmeans(points, k):
    """Global k-means optimum by enumerating every labelling of the points."""
    x = np.asarray(points, dtype=float)
    best = np.inf
    best_centers = None
    for labels in itertools.product(range(k), repeat=len(x)):
        labels = np.array(labels)
        if len(set(labels.tolist())) != k:
            continue
        centers = np.array([x[labels == c].mean(axis=0) for c in range(k)])
        cost = sum(float(((x[s] - centers[labels[s]]) ** 2).sum()) for s in range(len(x)))
        if cost < best:
            best, best_centers = cost, centers
    return best, best_centers


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """Record one PASS/FAIL summary line per acceptance criterion."""

    class Recorder:
        def __init__(self):
            self.detail = ""

        def __call__(self, name):
            self.name = name
            return self

        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            status = "PASS" if exc_type is None else "FAIL"
            ACCEPTANCE_LINES.append(f"[{status}] {self.name}: {self.detail}")
            return False

    return Recorder()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
