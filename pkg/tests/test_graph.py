import io
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from branchlab.graph import (EdgeList, Graph, GraphFormatError, diameter, generate_random,
                             load_edge_list, load_metis, to_csr)
from oracles import adjacency_lists, all_pairs_diameters, dense_symmetric


def test_metis_path():
    g = load_metis("3 2\n2\n1 3\n2\n")
    assert g.num_vertices == 3 and g.num_edges == 4
    assert g.offsets.tolist() == [0, 1, 3, 4]
    assert g.neighbors.tolist() == [1, 0, 2, 1]


def test_metis_isolated():
    g = load_metis("2 0\n\n\n")
    assert g.num_vertices == 2 and g.num_edges == 0


def test_metis_comments_and_stream():
    g = load_metis(io.StringIO("% a comment\n3 2\n% another\n2\n1 3\n2\n"))
    assert g.neighbors.tolist() == [1, 0, 2, 1]


def test_metis_skips_weights():
    # fmt=011: one vertex weight per line, edge weights after each neighbor
    g = load_metis("3 2 011\n5 2 7\n5 1 7 3 9\n5 2 9\n")
    assert g.neighbors.tolist() == [1, 0, 2, 1]


@pytest.mark.parametrize("text, line", [
    ("3\n", 1),
    ("x 2\n", 1),
    ("3 2\n2\n1 4\n2\n", 3),
    ("3 2\n2\n1\n2\n", 1),
    ("3 1\n2\n1 3\n\n", 1),
    ("2 1\n2\n\n", 1),
    ("2 2\n1 2\n1 2\n", 2),
])
def test_metis_errors_carry_line(text, line):
    with pytest.raises(GraphFormatError) as info:
        load_metis(text)
    assert info.value.line == line


def test_metis_asymmetric_reported():
    with pytest.raises(GraphFormatError, match="asymmetric"):
        load_metis("3 2\n2 3\n1\n2\n")


def test_edge_list_basic():
    el = load_edge_list("0 1\n1 2\n", 3)
    assert el.pairs == [(0, 1), (1, 2)]


def test_edge_list_self_loop_and_comment():
    assert load_edge_list("# c\n0 0\n", 1).pairs == [(0, 0)]


@pytest.mark.parametrize("text", ["0 x\n", "0 3\n", "0 1 2\n"])
def test_edge_list_errors(text):
    with pytest.raises(GraphFormatError):
        load_edge_list(text, 3)


def test_edge_list_round_trip_degrees():
    rng = random.Random(3)
    n = 40
    pairs = [(rng.randrange(n), rng.randrange(n)) for _ in range(100)]
    text = "".join(f"{u} {v}\n" for u, v in pairs)
    el = load_edge_list(text, n)
    assert el.pairs == pairs
    g = to_csr(el, symmetrize=True)
    # recount degrees from the distinct undirected non-loop pairs
    distinct = {frozenset(p) for p in pairs if p[0] != p[1]}
    deg = [0] * n
    for e in distinct:
        for v in e:
            deg[v] += 1
    assert g.degrees().tolist() == deg
    assert g.degrees().sum() == g.num_edges


def test_to_csr_single_edge():
    g = to_csr(EdgeList(2, [(0, 1)]), symmetrize=True)
    assert g.offsets.tolist() == [0, 1, 2]
    assert g.neighbors.tolist() == [1, 0]


def test_to_csr_dedups():
    g = to_csr(EdgeList(2, [(0, 1), (0, 1)]), symmetrize=True)
    assert g.num_edges == 2


def test_to_csr_directed_keeps_direction():
    g = to_csr(EdgeList(3, [(0, 1), (2, 1), (1, 1)]), symmetrize=False)
    assert g.neighbors.tolist() == [1, 1]
    with pytest.raises(ValueError):
        g.validate(undirected=True)


def test_to_csr_matches_dense_oracle():
    rng = random.Random(11)
    n = 50
    pairs = [(rng.randrange(n), rng.randrange(n)) for _ in range(150)]
    g = to_csr(EdgeList(n, pairs), symmetrize=True).validate()
    mat = np.zeros((n, n), dtype=bool)
    e = g.edges()
    mat[e[:, 0], e[:, 1]] = True
    assert np.array_equal(mat, dense_symmetric(n, pairs))
    for v in range(n):
        adj = g.adjacency(v).tolist()
        assert adj == sorted(adj)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 30).flatmap(lambda n: st.tuples(
    st.just(n), st.lists(st.tuples(st.integers(0, max(n - 1, 0)), st.integers(0, max(n - 1, 0))),
                         max_size=80 if n else 0))))
def test_csr_edge_list_round_trip(case):
    n, pairs = case
    g = to_csr(EdgeList(n, pairs), symmetrize=True).validate()
    assert to_csr(g.to_edge_list(), symmetrize=False) == g
    assert g.degrees().sum() == g.num_edges
    assert np.all(g.degrees() >= 0)


def test_generate_complete_graph():
    g = generate_random(4, 6, 123)
    assert g.degrees().tolist() == [3, 3, 3, 3]
    assert g.num_edges == 12


def test_generate_empty():
    g = generate_random(10, 0, 7)
    assert g.num_vertices == 10 and g.num_edges == 0


def test_generate_deterministic():
    a = generate_random(1000, 5000, 42)
    b = generate_random(1000, 5000, 42)
    assert a.offsets.tobytes() == b.offsets.tobytes()
    assert a.neighbors.tobytes() == b.neighbors.tobytes()
    assert a.num_edges == 10000
    a.validate()
    assert a != generate_random(1000, 5000, 43)


def test_generate_capacity():
    with pytest.raises(ValueError, match="capacity"):
        generate_random(4, 7, 0)


def test_metis_round_trip():
    g = generate_random(60, 150, 5)
    assert load_metis(g.to_metis()) == g


def test_graph_rejects_bad_structure():
    with pytest.raises(ValueError):
        Graph(np.array([0, 2]), np.array([0]))
    with pytest.raises(ValueError):
        Graph(np.array([0, 1]), np.array([5]))
    with pytest.raises(ValueError):
        Graph(np.array([0, 2, 1]), np.array([0]))


def test_diameter_small():
    assert diameter(load_metis("3 2\n2\n1 3\n2\n")).value == 2
    assert diameter(generate_random(4, 6, 0)).value == 1
    d = diameter(to_csr(EdgeList(5, [(0, 1), (2, 3), (3, 4)])))
    assert (d.value, d.disconnected, d.component_max) == (2, True, 2)


def test_diameter_matches_all_pairs_bfs():
    g = generate_random(100, 300, 42)
    d = diameter(g)
    largest, overall = all_pairs_diameters(adjacency_lists(g))
    assert (d.value, d.component_max) == (largest, overall)
    assert d.disconnected == (not g.is_connected())
