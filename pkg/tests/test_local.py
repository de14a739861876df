import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fedkmeans.kmeans import Explicit, assign, lloyd
from fedkmeans.local import (
    frozen_objective,
    local_solve,
    m_step,
    match_local_to_neighbors,
    match_neighbors_to_local,
    surrogate,
)


def col(*vals):
    return np.array(vals, dtype=float).reshape(-1, 1)


def reference_frozen(x, w, snap, labels, a, b, alpha, star=True):
    """Frozen-matching objective written out term by term."""
    total = 0.0
    for s in range(len(x)):
        total += sum((x[s] - w[labels[s]]) ** 2)
    for j, v in enumerate(snap):
        for cp in range(len(v)):
            total += alpha * sum((v[cp] - w[a[j][cp]]) ** 2)
        if star:
            for c in range(len(w)):
                total += alpha * sum((w[c] - v[b[j][c]]) ** 2)
    return total


def random_instance(seed, n_nb=None):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, 5))
    d = int(rng.integers(1, 4))
    m = int(rng.integers(0, 25))
    n_nb = int(rng.integers(0, 4)) if n_nb is None else n_nb
    x = rng.normal(size=(m, d)) * 3
    w = rng.normal(size=(k, d)) * 3
    snap = [rng.normal(size=(k, d)) * 3 for _ in range(n_nb)]
    alpha = float(rng.choice([0.0, 0.01, 0.5, 1.0, 3.0, 100.0]))
    return x, w, snap, alpha


def test_identity_matching():
    w = np.array([[0.0, 0.0], [5.0, 1.0], [-3.0, 2.0]])
    assert match_neighbors_to_local(w, [w]).tolist() == [[0, 1, 2]]
    assert match_local_to_neighbors(w, [w]).tolist() == [[0, 1, 2]]


def test_crossed_matching():
    w, v = col(0, 10), col(9, 1)
    assert match_neighbors_to_local(w, [v]).tolist() == [[1, 0]]
    assert match_local_to_neighbors(w, [v]).tolist() == [[1, 0]]


def test_single_centroid_matching():
    assert match_neighbors_to_local(col(3), [col(-7), col(2)]).tolist() == [[0], [0]]
    assert match_local_to_neighbors(col(3), [col(-7), col(2)]).tolist() == [[0], [0]]


def test_no_neighbours_tables_are_empty():
    assert match_neighbors_to_local(col(1, 2), []).shape == (0, 2)


def test_m_step_hand_example():
    x, w, snap = col(1, 3), col(0), [col(2)]
    labels = assign(x, w)
    a, b = match_neighbors_to_local(w, snap), match_local_to_neighbors(w, snap)
    assert m_step(x, w, snap, labels, a, b, 1.0).tolist() == [[2.0]]


def test_m_step_alpha_zero_is_mean():
    x = col(0, 1, 2, 10, 14)
    w = col(1, 11)
    snap = [col(100, -100)]
    labels = assign(x, w)
    a, b = match_neighbors_to_local(w, snap), match_local_to_neighbors(w, snap)
    assert m_step(x, w, snap, labels, a, b, 0.0).ravel().tolist() == [1.0, 12.0]


def test_m_step_zero_denominator_keeps_centroid():
    x, w = col(0, 1), col(0.5, 100)
    labels = assign(x, w)
    new = m_step(x, w, [], labels, np.zeros((0, 2), int), np.zeros((0, 2), int), 0.0)
    assert new.ravel().tolist() == [0.5, 100.0]


def test_m_step_empty_cluster_pulled_by_neighbours_only():
    # no local point and no neighbour centroid nearest to centroid 1, only the star term
    x, w, snap = col(0, 1), col(0.5, 100), [col(0, 1)]
    labels = assign(x, w)
    a, b = match_neighbors_to_local(w, snap), match_local_to_neighbors(w, snap)
    new = m_step(x, w, snap, labels, a, b, 2.0)
    assert new[1, 0] == 1.0


def test_m_step_rejects_negative_alpha():
    with pytest.raises(ValueError):
        m_step(col(0), col(0), [], np.zeros(1, int), np.zeros((0, 1), int), np.zeros((0, 1), int), -1)


@pytest.mark.parametrize("seed", range(40))
def test_m_step_finite_difference_stationarity(seed):
    x, w, snap, alpha = random_instance(seed)
    labels = assign(x, w)
    a, b = match_neighbors_to_local(w, snap), match_local_to_neighbors(w, snap)
    new = m_step(x, w, snap, labels, a, b, alpha)
    base = reference_frozen(x, new, snap, labels, a, b, alpha)
    assert base == pytest.approx(frozen_objective(x, new, snap, labels, a, b, alpha), rel=1e-12)
    delta = 1e-6
    for c in range(len(new)):
        for axis in range(new.shape[1]):
            for sign in (1, -1):
                moved = new.copy()
                moved[c, axis] += sign * delta
                assert reference_frozen(x, moved, snap, labels, a, b, alpha) >= base - 1e-8


@pytest.mark.parametrize("seed", range(40))
def test_local_solve_trace_monotone(seed):
    x, w, snap, alpha = random_instance(seed)
    rep = local_solve(x, w, snap, alpha, max_iter=30, tol=0.0)
    tr = np.array(rep.surrogate_trace)
    assert (np.diff(tr) <= 1e-9 * np.abs(tr[:-1])).all()
    assert rep.inner_iterations == len(tr) - 1
    assert tr[-1] == pytest.approx(surrogate(x, rep.centroids, snap, alpha), rel=1e-12)


@given(seed=st.integers(0, 10_000), tol=st.sampled_from([0.0, 1e-6, 1e-3]), max_iter=st.integers(1, 40))
def test_no_neighbours_is_lloyd(seed, tol, max_iter):
    x, w, _, alpha = random_instance(seed, n_nb=0)
    if len(x) == 0:
        return
    rep = local_solve(x, w, [], alpha, max_iter=max_iter, tol=tol)
    ref = lloyd(x, len(w), Explicit(w), max_iter=max_iter, tol=tol)
    np.testing.assert_array_equal(rep.centroids, ref.centroids)
    assert rep.surrogate_trace == ref.trace


@given(seed=st.integers(0, 10_000))
def test_alpha_zero_ignores_neighbours(seed):
    x, w, snap, _ = random_instance(seed, n_nb=2)
    if len(x) == 0:
        return
    rep = local_solve(x, w, snap, 0.0)
    ref = lloyd(x, len(w), Explicit(w))
    np.testing.assert_array_equal(rep.centroids, ref.centroids)
    assert rep.surrogate_trace == ref.trace


def test_empty_local_dataset_follows_neighbours():
    snap = [col(1, 5), col(3, 7)]
    rep = local_solve(np.zeros((0, 1)), col(0, 10), snap, alpha=1.0, tol=0.0, max_iter=100)
    np.testing.assert_allclose(np.sort(rep.centroids.ravel()), [2.0, 6.0])


@pytest.mark.parametrize("seed", range(20))
def test_neighbour_permutation_invariance(seed):
    x, w, snap, alpha = random_instance(seed, n_nb=3)
    rng = np.random.default_rng(seed + 1000)
    shuffled = [v[rng.permutation(len(v))] for v in snap]
    labels = assign(x, w)

    def step(s):
        return m_step(x, w, s, labels, match_neighbors_to_local(w, s), match_local_to_neighbors(w, s), alpha)

    np.testing.assert_allclose(step(shuffled), step(snap), rtol=1e-13, atol=1e-13)


def test_augmented_dataset_equivalence_small():
    rng = np.random.default_rng(3)
    x = np.vstack([rng.normal(0, 1, (15, 2)), rng.normal(8, 1, (15, 2))])
    snap = [np.array([[0.5, 0.2], [7.0, 8.5]]), np.array([[-1.0, 0.0], [9.0, 7.5]])]
    rep = local_solve(x, x[[0, 20]], snap, 1.0, max_iter=200, tol=0.0, star=False)
    augmented = np.vstack([x, *snap])
    one = lloyd(augmented, 2, Explicit(rep.centroids), max_iter=1, tol=0.0)
    np.testing.assert_allclose(one.centroids, rep.centroids, atol=1e-12, rtol=0)
