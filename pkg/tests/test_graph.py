import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fedkmeans.graph import (
    DeviceGraph,
    build_topology,
    connected_random,
    is_connected,
    read_edge_list,
    write_edge_list,
)


def reachable_from_zero(n, edges):
    # plain fixed-point closure, independent of the BFS in the library
    reach = {0}
    changed = True
    while changed:
        changed = False
        for i, j in edges:
            if (i in reach) != (j in reach):
                reach |= {i, j}
                changed = True
    return len(reach) == n


def test_complete_three():
    assert build_topology("complete", 3).edges == {(0, 1), (0, 2), (1, 2)}


def test_ring_four():
    assert build_topology("ring", 4).edges == {(0, 1), (1, 2), (2, 3), (0, 3)}


@pytest.mark.parametrize("n", [3, 4, 7, 20])
def test_edge_counts(n):
    assert len(build_topology("ring", n).edges) == n
    assert len(build_topology("complete", n).edges) == n * (n - 1) // 2


def test_self_loop_rejected():
    with pytest.raises(ValueError, match="self-loop"):
        build_topology("edge_list", 2, edges=[(1, 1)])


def test_out_of_range_rejected():
    with pytest.raises(ValueError, match="outside"):
        build_topology("edge_list", 2, edges=[(0, 2)])


def test_edges_deduplicated():
    g = DeviceGraph.from_pairs(3, [(0, 1), (1, 0), (0, 1)])
    assert g.edges == {(0, 1)}


@pytest.mark.parametrize(
    "n,edges,expected",
    [(1, [], True), (2, [], False), (4, [(0, 1), (1, 2), (2, 3), (3, 0)], True)],
)
def test_is_connected_examples(n, edges, expected):
    assert is_connected(DeviceGraph.from_pairs(n, edges)) is expected


def test_neighbourhood_examples():
    assert set(build_topology("ring", 4).neighbourhood(1)) == {0, 2}
    assert set(build_topology("complete", 3).neighbourhood(0)) == {1, 2}
    assert build_topology("edge_list", 2, edges=[]).neighbourhood(0) == ()
    with pytest.raises(ValueError):
        build_topology("ring", 4).neighbourhood(4)


def test_is_connected_exhaustive_small():
    rnd = random.Random(0)
    for n in range(1, 7):
        pairs = list(itertools.combinations(range(n), 2))
        if len(pairs) <= 10:
            subsets = itertools.chain.from_iterable(
                itertools.combinations(pairs, r) for r in range(len(pairs) + 1)
            )
        else:
            subsets = ([p for p in pairs if rnd.random() < q] for q in [0.1, 0.2, 0.3, 0.5] * 100)
        for edges in subsets:
            assert is_connected(DeviceGraph.from_pairs(n, edges)) == reachable_from_zero(n, edges)


@given(n=st.integers(1, 9), p=st.floats(0, 1), seed=st.integers(0, 2**31))
def test_random_graph_invariants(n, p, seed):
    g = build_topology("random", n, p=p, seed=seed)
    assert g == build_topology("random", n, p=p, seed=seed)
    assert sum(g.degree(i) for i in range(n)) == 2 * len(g.edges)
    for i in range(n):
        assert i not in g.neighbourhood(i)
        for j in g.neighbourhood(i):
            assert i in g.neighbourhood(j)


def test_connected_random_reports_seed():
    g, used = connected_random(8, 0.3, seed=5)
    assert is_connected(g)
    assert used >= 5
    assert g == build_topology("random", 8, p=0.3, seed=used)


def test_connected_random_gives_up():
    with pytest.raises(RuntimeError):
        connected_random(5, 0.0, seed=0, max_tries=3)


def test_edge_list_file_roundtrip(tmp_path):
    path = tmp_path / "edges.txt"
    path.write_text("# a comment\n1 2\n2   3\n\n3 1\n")
    g = read_edge_list(path)
    assert g.n == 3 and g.edges == {(0, 1), (1, 2), (0, 2)}
    write_edge_list(g, tmp_path / "out.txt")
    assert read_edge_list(tmp_path / "out.txt") == g


def test_edge_list_file_errors(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("1 1\n")
    with pytest.raises(ValueError, match="self-loop"):
        read_edge_list(path)
    path.write_text("0 1\n")
    with pytest.raises(ValueError, match="1-based"):
        read_edge_list(path)
    path.write_text("1 x\n")
    with pytest.raises(ValueError, match=":1:"):
        read_edge_list(path)
