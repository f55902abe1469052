"""Label-propagation connected components (Shiloach-Vishkin style).

Both variants sweep all vertices per iteration, lowering each vertex's label
to the minimum over itself and its neighbors, until a sweep changes nothing.
The branch-based variant tests each neighbor with a conditional branch; the
branch-avoiding variant folds the minimum with a conditional select and
writes every label back once per sweep.

Instrumented branch sites:

``sv.while``         the convergence test (taken while ``change != 0``)
``sv.for_vertices``  the vertex-loop test (taken while vertices remain)
``sv.for_neighbors`` the adjacency-loop test (taken while neighbors remain)
``sv.if``            branch-based only: taken when a neighbor's label is smaller
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .graph import Graph
from .tracer import IterationLog, IterationStats, NullRecorder

SITE_WHILE = "sv.while"
SITE_VERTICES = "sv.for_vertices"
SITE_NEIGHBORS = "sv.for_neighbors"
SITE_IF = "sv.if"


@dataclass(frozen=True)
class CcRunResult:
    labels: np.ndarray
    iterations: int
    per_iteration: tuple[IterationStats, ...]
    changes_per_iteration: tuple[int, ...]


def _finish(cc, log, changes) -> CcRunResult:
    labels = np.asarray(cc, dtype=np.int64)
    labels.setflags(write=False)
    per_iter = tuple(log.finish())
    return CcRunResult(labels, len(per_iter), per_iter, tuple(changes))


def sv_branch_based(graph: Graph, recorder=None, clock=time.perf_counter) -> CcRunResult:
    rec = recorder if recorder is not None else NullRecorder()
    off = graph.offsets.tolist()
    nbr = graph.neighbors.tolist()
    n = graph.num_vertices
    m = graph.num_edges
    w_site = rec.site(SITE_WHILE)
    v_site = rec.site(SITE_VERTICES)
    u_site = rec.site(SITE_NEIGHBORS)
    if_site = rec.site(SITE_IF)
    branch, load, store, arith = rec.record_branch, rec.record_load, rec.record_store, rec.record_arith

    cc = list(range(n))
    log = IterationLog(rec, clock)
    changes = []
    change = 1
    while True:
        log.mark()
        branch(w_site, change != 0)
        if not change:
            log.drop_last()
            break
        change = 0
        changed_vertices = 0
        v = 0
        while True:
            branch(v_site, v < n)
            if v >= n:
                break
            cv = cc[v]
            load(1, "cc_id")
            improved = False
            i, end = off[v], off[v + 1]
            while True:
                branch(u_site, i < end)
                if i >= end:
                    break
                cu = cc[nbr[i]]
                load(1, "cc_id")
                taken = cu < cv
                branch(if_site, taken)
                if taken:
                    cc[v] = cv = cu
                    store(1, "cc_id")
                    change = 1
                    arith(1)
                    improved = True
                i += 1
                arith(1)
            changed_vertices += improved
            v += 1
            arith(1)
        log.edges += m
        changes.append(changed_vertices)
    return _finish(cc, log, changes)


def sv_branch_avoiding(graph: Graph, recorder=None, clock=time.perf_counter) -> CcRunResult:
    rec = recorder if recorder is not None else NullRecorder()
    off = graph.offsets.tolist()
    nbr = graph.neighbors.tolist()
    n = graph.num_vertices
    m = graph.num_edges
    w_site = rec.site(SITE_WHILE)
    v_site = rec.site(SITE_VERTICES)
    u_site = rec.site(SITE_NEIGHBORS)
    branch, load, store = rec.record_branch, rec.record_load, rec.record_store
    cmov, arith = rec.record_cmov, rec.record_arith

    cc = list(range(n))
    log = IterationLog(rec, clock)
    changes = []
    change = 1
    while True:
        log.mark()
        branch(w_site, change != 0)
        if not change:
            log.drop_last()
            break
        change = 0
        changed_vertices = 0
        v = 0
        while True:
            branch(v_site, v < n)
            if v >= n:
                break
            cv_init = cc[v]
            load(1, "cc_id")
            cv = cv_init
            i, end = off[v], off[v + 1]
            while True:
                branch(u_site, i < end)
                if i >= end:
                    break
                cu = cc[nbr[i]]
                load(1, "cc_id")
                # compare + conditional move, no branch on the outcome
                cv = min(cv, cu)
                cmov(1)
                i += 1
                arith(1)
            cc[v] = cv
            store(1, "cc_id")
            diff = cv ^ cv_init
            change |= diff
            arith(2)
            changed_vertices += diff != 0
            v += 1
            arith(1)
        log.edges += m
        changes.append(changed_vertices)
    return _finish(cc, log, changes)


def count_components(labels) -> int:
    """Number of distinct labels."""
    return int(np.unique(np.asarray(labels)).size)
