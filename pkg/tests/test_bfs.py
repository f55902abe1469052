import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from branchlab import (UNREACHED, EdgeList, bfs_branch_avoiding, bfs_branch_based,
                       generate_random, load_metis, to_csr)
from branchlab.predictor import PredictorState as S
from branchlab.tracer import TraceRecorder
from oracles import adjacency_lists, textbook_bfs

PATH3 = "3 2\n2\n1 3\n2\n"
VARIANTS = [bfs_branch_based, bfs_branch_avoiding]


def oracle_distances(g, root):
    return [UNREACHED if d is None else d for d in textbook_bfs(adjacency_lists(g), root)]


@pytest.mark.parametrize("algo", VARIANTS)
def test_path(algo):
    assert algo(load_metis(PATH3), 0).distances.tolist() == [0, 1, 2]


def test_star_if_site():
    star = to_csr(EdgeList(5, [(0, i) for i in range(1, 5)]))
    rec = TraceRecorder()
    res = bfs_branch_based(star, 0, rec)
    assert res.distances.tolist() == [0, 1, 1, 1, 1]
    site = rec.report().site("bfs.if")
    # center: 4 discoveries; each leaf re-checks the center once
    assert (site.evaluations, site.taken) == (8, 4)


@pytest.mark.parametrize("algo", VARIANTS)
def test_random_matches_textbook_bfs(algo, random_500_1500):
    res = algo(random_500_1500, 0, TraceRecorder())
    assert res.distances.tolist() == oracle_distances(random_500_1500, 0)


def test_avoiding_stores_and_no_if():
    rec = TraceRecorder()
    res = bfs_branch_avoiding(load_metis(PATH3), 0, rec)
    snap = rec.report()
    assert res.distances.tolist() == [0, 1, 2]
    assert snap.stores_to("d") == res.edges_traversed == 4
    assert snap.site("bfs.if") is None


@pytest.mark.parametrize("root", [0, 17, 499])
def test_queue_contents_agree(random_500_1500, root):
    a = bfs_branch_based(random_500_1500, root)
    b = bfs_branch_avoiding(random_500_1500, root)
    assert sorted(a.queue.tolist()) == sorted(b.queue.tolist())
    assert a.distances.tobytes() == b.distances.tobytes()
    assert len(set(b.queue.tolist())) == b.queue.size


def test_result_invariants(random_500_1500):
    g = random_500_1500
    res = bfs_branch_based(g, 3)
    d = res.distances
    assert d[3] == 0
    reached = d != UNREACHED
    assert res.reached == int(reached.sum())
    assert res.edges_traversed == int(g.degrees()[res.queue].sum())
    for u, v in g.edges().tolist():
        if reached[u] and reached[v]:
            assert abs(int(d[u]) - int(d[v])) <= 1
    for v in np.flatnonzero(reached & (d > 0)):
        assert any(d[u] == d[v] - 1 for u in g.adjacency(v))
    # the queue is level ordered
    assert np.all(np.diff(d[res.queue]) >= 0)


@pytest.mark.parametrize("init", list(S))
def test_branch_accounting(random_500_1500, init):
    rec = TraceRecorder(init)
    res = bfs_branch_based(random_500_1500, 0, rec)
    snap = rec.report()
    vhat, ehat = res.reached, res.edges_traversed
    assert snap.site("bfs.while").evaluations == vhat + 1
    assert snap.site("bfs.for").evaluations == ehat + vhat
    assert snap.site("bfs.if").evaluations == ehat
    assert snap.site("bfs.if").taken == vhat - 1
    assert snap.site("bfs.if").mispredictions <= 2 * vhat
    assert vhat - 8 <= snap.mispredictions <= 3 * vhat + 8


def test_store_ratio(random_500_1500):
    rb, ra = TraceRecorder(), TraceRecorder()
    b = bfs_branch_based(random_500_1500, 0, rb)
    bfs_branch_avoiding(random_500_1500, 0, ra)
    ratio = ra.report().stores_to("d") / rb.report().stores_to("d")
    assert ratio == pytest.approx(b.edges_traversed / (b.reached - 1))


def test_per_level_stats(random_500_1500):
    res = bfs_branch_based(random_500_1500, 0, TraceRecorder())
    assert res.levels == int(res.distances[res.queue].max()) + 1
    assert sum(s.edges_traversed for s in res.per_level) == res.edges_traversed
    levels = np.bincount(res.distances[res.queue])
    assert res.per_level[0].edges_traversed == random_500_1500.degree(0)
    assert len(levels) == res.levels


def test_single_vertex():
    g = load_metis("1 0\n\n")
    rec = TraceRecorder()
    res = bfs_branch_based(g, 0, rec)
    assert res.reached == 1 and res.distances.tolist() == [0]
    assert rec.report().mispredictions <= 11


@pytest.mark.parametrize("algo", VARIANTS)
def test_root_out_of_range(algo):
    with pytest.raises(ValueError):
        algo(load_metis(PATH3), 3)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 40), st.integers(0, 10_000), st.data())
def test_variants_equivalent_property(n, seed, data):
    m = data.draw(st.integers(0, min(3 * n, n * (n - 1) // 2)))
    g = generate_random(n, m, seed)
    root = data.draw(st.integers(0, n - 1))
    a = bfs_branch_based(g, root)
    b = bfs_branch_avoiding(g, root)
    assert a.distances.tolist() == b.distances.tolist() == oracle_distances(g, root)
    assert a.queue.tolist() == b.queue.tolist()


def test_directed_graph_allowed():
    g = to_csr(EdgeList(3, [(0, 1), (1, 2)]), symmetrize=False)
    for algo in VARIANTS:
        assert algo(g, 0).distances.tolist() == [0, 1, 2]
        assert algo(g, 2).distances.tolist() == [UNREACHED, UNREACHED, 0]
