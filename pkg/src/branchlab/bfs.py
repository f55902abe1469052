"""Top-down breadth-first search, branch-based and branch-avoiding.

Instrumented branch sites:

``bfs.while``  queue-not-empty test (taken while vertices remain)
``bfs.for``    adjacency-loop test (taken while neighbors remain)
``bfs.if``     branch-based only: taken when a neighbor is reached for the first time

The branch-avoiding variant speculatively writes every neighbor into the
slot just past the queue tail, then advances the tail and lowers the
neighbor's distance with conditional selects, and stores the distance back
unconditionally.  Stores are counted per array (``d`` and ``queue``); the
setup writes for the root happen before instrumentation starts.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .graph import Graph
from .tracer import IterationLog, IterationStats, NullRecorder

SITE_WHILE = "bfs.while"
SITE_FOR = "bfs.for"
SITE_IF = "bfs.if"

UNREACHED = np.iinfo(np.int64).max


@dataclass(frozen=True)
class BfsRunResult:
    distances: np.ndarray
    queue: np.ndarray
    edges_traversed: int
    per_level: tuple[IterationStats, ...]

    @property
    def reached(self) -> int:
        return int(self.queue.size)

    @property
    def levels(self) -> int:
        return len(self.per_level)


def _check_root(graph: Graph, root: int) -> None:
    if not 0 <= root < graph.num_vertices:
        raise ValueError(f"root {root} out of range for {graph.num_vertices} vertices")


def _finish(d, queue, tail, edges, log) -> BfsRunResult:
    dist = np.asarray(d, dtype=np.int64)
    q = np.asarray(queue[:tail], dtype=np.int64)
    dist.setflags(write=False)
    q.setflags(write=False)
    return BfsRunResult(dist, q, edges, tuple(log.finish()))


def bfs_branch_based(graph: Graph, root: int, recorder=None,
                     clock=time.perf_counter) -> BfsRunResult:
    _check_root(graph, root)
    rec = recorder if recorder is not None else NullRecorder()
    off = graph.offsets.tolist()
    nbr = graph.neighbors.tolist()
    n = graph.num_vertices
    w_site = rec.site(SITE_WHILE)
    f_site = rec.site(SITE_FOR)
    if_site = rec.site(SITE_IF)
    branch, load, store, arith = rec.record_branch, rec.record_load, rec.record_store, rec.record_arith

    d = [UNREACHED] * n
    queue = [0] * (n + 1)
    queue[0] = root
    d[root] = 0
    head, tail = 0, 1
    edges = 0
    level = -1
    log = IterationLog(rec, clock)
    while True:
        # per-level stats: a new level opens when the next queued vertex is deeper
        if head < tail and d[queue[head]] != level:
            level = d[queue[head]]
            log.mark()
        branch(w_site, head < tail)
        if head >= tail:
            break
        v = queue[head]
        load(1, "queue")
        head += 1
        arith(1)
        dv = d[v]
        load(1, "d")
        i, end = off[v], off[v + 1]
        log.edges += end - i
        edges += end - i
        while True:
            branch(f_site, i < end)
            if i >= end:
                break
            w = nbr[i]
            dw = d[w]
            load(1, "d")
            found = dw == UNREACHED
            branch(if_site, found)
            if found:
                queue[tail] = w
                store(1, "queue")
                tail += 1
                d[w] = dv + 1
                store(1, "d")
                arith(2)
            i += 1
            arith(1)
    return _finish(d, queue, tail, edges, log)


def bfs_branch_avoiding(graph: Graph, root: int, recorder=None,
                        clock=time.perf_counter) -> BfsRunResult:
    _check_root(graph, root)
    rec = recorder if recorder is not None else NullRecorder()
    off = graph.offsets.tolist()
    nbr = graph.neighbors.tolist()
    n = graph.num_vertices
    w_site = rec.site(SITE_WHILE)
    f_site = rec.site(SITE_FOR)
    branch, load, store = rec.record_branch, rec.record_load, rec.record_store
    cmov, arith = rec.record_cmov, rec.record_arith

    d = [UNREACHED] * n
    # one spare slot: the speculative write may land just past the last vertex
    queue = [0] * (n + 1)
    queue[0] = root
    d[root] = 0
    head, tail = 0, 1
    edges = 0
    level = -1
    log = IterationLog(rec, clock)
    while True:
        if head < tail and d[queue[head]] != level:
            level = d[queue[head]]
            log.mark()
        branch(w_site, head < tail)
        if head >= tail:
            break
        v = queue[head]
        load(1, "queue")
        head += 1
        next_level = d[v] + 1
        load(1, "d")
        arith(2)
        i, end = off[v], off[v + 1]
        log.edges += end - i
        edges += end - i
        while True:
            branch(f_site, i < end)
            if i >= end:
                break
            w = nbr[i]
            temp = d[w]
            load(1, "d")
            queue[tail] = w
            store(1, "queue")
            # flags from one compare drive both conditional operations
            new = temp > next_level
            temp = next_level if new else temp
            tail += new
            cmov(2)
            d[w] = temp
            store(1, "d")
            i += 1
            arith(1)
    return _finish(d, queue, tail, edges, log)
