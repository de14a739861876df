from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fedkmeans.data import FederatedDataset
from fedkmeans.graph import DeviceGraph, build_topology
from fedkmeans.gtv import discrepancy, gtv, gtvmin_objective

# halves in [-3, 3]: exact in binary floating point
halves = st.integers(-6, 6).map(lambda v: v / 2)


def exact_terms(wi, wj):
    """Both discrepancy terms in rational arithmetic."""
    fi = [[Fraction(v) for v in row] for row in wi]
    fj = [[Fraction(v) for v in row] for row in wj]

    def sq(a, b):
        return sum((p - q) ** 2 for p, q in zip(a, b))

    term_i = sum(min(sq(a, b) for b in fj) for a in fi)
    term_ii = sum(min(sq(b, a) for a in fi) for b in fj)
    return term_i, term_ii


@st.composite
def matrix_pairs(draw):
    k = draw(st.integers(1, 4))
    d = draw(st.integers(1, 3))
    wi = draw(st.lists(st.lists(halves, min_size=d, max_size=d), min_size=k, max_size=k))
    mode = draw(st.sampled_from(["perm", "resample", "fresh"]))
    if mode == "perm":
        wj = draw(st.permutations(wi))
    elif mode == "resample":
        wj = [wi[draw(st.integers(0, k - 1))] for _ in range(k)]
    else:
        wj = draw(st.lists(st.lists(halves, min_size=d, max_size=d), min_size=k, max_size=k))
    return np.array(wi, dtype=float), np.array(wj, dtype=float)


def test_identical():
    w = np.array([[0.0, 1.0], [2.0, 3.0]])
    assert discrepancy(w, w).total == 0.0


def test_permuted():
    w = np.array([[0.0, 1.0], [2.0, 3.0], [5.0, -1.0]])
    assert discrepancy(w, w[[2, 0, 1]]).total == 0.0


def test_single_centroid_example():
    d = discrepancy([[0.0]], [[2.0]])
    assert (d.term_I, d.term_II, d.total) == (4.0, 4.0, 8.0)


def test_shape_mismatch():
    with pytest.raises(ValueError):
        discrepancy(np.zeros((2, 1)), np.zeros((3, 1)))
    with pytest.raises(ValueError):
        discrepancy(np.zeros((2, 1)), np.zeros((2, 2)))


@given(matrix_pairs())
def test_matches_exact_oracle(pair):
    wi, wj = pair
    t1, t2 = exact_terms(wi, wj)
    d = discrepancy(wi, wj)
    assert Fraction(d.term_I) == t1 and Fraction(d.term_II) == t2
    sets_equal = {tuple(r) for r in wi.tolist()} == {tuple(r) for r in wj.tolist()}
    assert (d.total == 0) == sets_equal
    assert (d.term_I == 0) == ({tuple(r) for r in wi.tolist()} <= {tuple(r) for r in wj.tolist()})
    rev = discrepancy(wj, wi)
    assert rev.total == d.total and rev.term_I == d.term_II and rev.term_II == d.term_I


def test_gtv_examples():
    w = np.array([[1.0, 2.0], [3.0, 4.0]])
    ring = build_topology("ring", 4)
    assert gtv([w] * 4, ring) == 0.0
    g = DeviceGraph.from_pairs(2, [(0, 1)])
    assert gtv([np.array([[0.0]]), np.array([[2.0]])], g) == 8.0
    assert gtv([np.array([[0.0]]), np.array([[2.0]])], DeviceGraph(2)) == 0.0
    with pytest.raises(ValueError):
        gtv([w] * 3, ring)


def test_objective_examples():
    ds = FederatedDataset(locals=(np.array([[0.0]]), np.array([[2.0]])), d=1)
    states = [np.array([[0.0]]), np.array([[2.0]])]
    g = DeviceGraph.from_pairs(2, [(0, 1)])
    assert gtvmin_objective(ds, states, g, 0.5) == 4.0
    assert gtvmin_objective(ds, states, g, 0.0) == 0.0
    shared = [np.array([[1.0]])] * 2
    assert gtvmin_objective(ds, shared, g, 3.0) == 2.0


@given(seed=st.integers(0, 10_000), alpha=st.floats(0, 50), perm_seed=st.integers(0, 100))
def test_objective_linear_in_alpha_and_permutation_invariant(seed, alpha, perm_seed):
    rng = np.random.default_rng(seed)
    n, k, d = 4, 3, 2
    ds = FederatedDataset(locals=tuple(rng.normal(size=(5, d)) for _ in range(n)), d=d)
    states = [rng.normal(size=(k, d)) for _ in range(n)]
    g = build_topology("ring", n)
    base = gtvmin_objective(ds, states, g, 0.0)
    tv = gtv(states, g)
    assert gtvmin_objective(ds, states, g, alpha) == pytest.approx(base + alpha * tv, rel=1e-12)
    prng = np.random.default_rng(perm_seed)
    permuted = [w[prng.permutation(k)] for w in states]
    assert gtv(permuted, g) == pytest.approx(tv, rel=1e-12)
    assert gtvmin_objective(ds, permuted, g, alpha) == pytest.approx(
        gtvmin_objective(ds, states, g, alpha), rel=1e-12
    )
