"""Misprediction bounds, per-iteration ratio tables and metric correlations."""

from __future__ import annotations

import gc
import statistics
import time
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .bfs import BfsRunResult
from .cc import CcRunResult
from .graph import Graph
from .tracer import IterationStats, NullRecorder

METRICS = ("T", "I", "B", "M", "L", "S")

# O(1) slack of the BFS upper bound: while (3) + for (3) + if (2) start-up misses
BFS_UPPER_SLACK = 8
# the while and vertex loops contribute at most 3 start-up misses each
SV_LOWER_CONSTANT = 6


@dataclass(frozen=True)
class BoundsReport:
    algorithm: str
    measured_mispredictions: int
    lower_bound: int
    upper_bound: int | None
    ratio_to_lower: float

    @property
    def within(self) -> bool:
        """Measured count lies in [lower, upper] (upper treated as unbounded if absent)."""
        if self.measured_mispredictions < self.lower_bound:
            return False
        return self.upper_bound is None or self.measured_mispredictions <= self.upper_bound

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "measured_mispredictions": self.measured_mispredictions,
            "lower_bound": self.lower_bound,
            "upper_bound": self.upper_bound,
            "ratio_to_lower": self.ratio_to_lower,
        }


def _total_mispredictions(stats: Sequence[IterationStats]) -> int:
    return sum(s.mispredictions for s in stats)


def sv_bounds(run: CcRunResult, graph: Graph, algorithm: str = "sv") -> BoundsReport:
    """Lower bound ``iterations * |V| + 6`` for SV; no analytic upper bound.

    The neighbor loop runs ``|V|`` times per iteration and costs about one
    miss per run; the convergence and vertex loops add a few start-up misses.
    The data-dependent ``if`` has no closed form.
    """
    lower = run.iterations * graph.num_vertices + SV_LOWER_CONSTANT
    measured = _total_mispredictions(run.per_iteration)
    return BoundsReport(algorithm, measured, lower, None, measured / lower)


def bfs_bounds(run: BfsRunResult, algorithm: str = "bfs") -> BoundsReport:
    """Lower bound ``|V̂|`` and upper bound ``3|V̂| + 8`` on BFS mispredictions."""
    lower = run.reached
    measured = _total_mispredictions(run.per_level)
    return BoundsReport(algorithm, measured, lower, 3 * lower + BFS_UPPER_SLACK,
                        measured / lower)


@dataclass(frozen=True)
class CorrelationMatrix:
    """Pearson coefficients among T, I, B, M, L, S (per edge).

    ``values`` is a masked array; entries involving a zero-variance metric
    are masked rather than NaN.
    """

    labels: tuple[str, ...]
    values: np.ma.MaskedArray
    num_samples: int

    def get(self, row: str, col: str) -> float | None:
        v = self.values[self.labels.index(row), self.labels.index(col)]
        return None if v is np.ma.masked else float(v)

    def to_dict(self) -> dict:
        return {
            "labels": list(self.labels),
            "num_samples": self.num_samples,
            "matrix": [[None if v is np.ma.masked else float(v) for v in row]
                       for row in self.values],
        }

    def csv_rows(self) -> list[list]:
        rows = [["", *self.labels]]
        for label, row in zip(self.labels, self.values):
            rows.append([label, *("" if v is np.ma.masked else f"{float(v):.6f}" for v in row)])
        return rows


def correlation_matrix(data: np.ndarray, labels: Sequence[str]) -> CorrelationMatrix:
    """Pearson correlation between the columns of ``data`` (samples x metrics)."""
    data = np.asarray(data, dtype=float)
    if data.ndim != 2 or data.shape[1] != len(labels):
        raise ValueError("data must be a (samples, metrics) array matching labels")
    if data.shape[0] < 3:
        raise ValueError(f"need at least 3 samples, got {data.shape[0]}")
    centered = data - data.mean(axis=0)
    norms = np.sqrt((centered ** 2).sum(axis=0))
    scale = np.abs(data).max(axis=0)
    # variance below round-off of the column's magnitude counts as constant
    degenerate = norms <= 1e-12 * np.maximum(scale, 1e-300) * np.sqrt(data.shape[0])
    safe = np.where(degenerate, 1.0, norms)
    unit = centered / safe
    corr = np.clip(unit.T @ unit, -1.0, 1.0)
    np.fill_diagonal(corr, 1.0)
    mask = degenerate[:, None] | degenerate[None, :]
    return CorrelationMatrix(tuple(labels), np.ma.MaskedArray(corr, mask=mask), data.shape[0])


def correlate(samples: Sequence[IterationStats]) -> CorrelationMatrix:
    """Correlate per-edge T, I, B, M, L, S over iteration samples."""
    if len(samples) < 3:
        raise ValueError(f"need at least 3 samples, got {len(samples)}")
    rows = [[s.per_edge()[k] for k in METRICS] for s in samples]
    return correlation_matrix(np.array(rows), METRICS)


@dataclass(frozen=True)
class RatioRow:
    index: int
    time_based: float
    time_avoiding: float
    branches_based: int
    branches_avoiding: int
    mispredictions_based: int
    mispredictions_avoiding: int
    stores_based: int
    stores_avoiding: int
    time_ratio_based: float
    time_ratio_avoiding: float
    branch_ratio: float
    misprediction_ratio: float
    store_ratio: float


@dataclass(frozen=True)
class RatioTable:
    """Branch-based vs. branch-avoiding, iteration by iteration.

    Time ratios are relative to the fastest branch-based iteration.  Branch
    and misprediction ratios are based/avoiding; the store ratio is
    avoiding/based.  Undefined ratios (zero denominators) are NaN.
    """

    rows: tuple[RatioRow, ...]
    totals: dict
    speedup: float

    def to_dicts(self) -> list[dict]:
        return [r.__dict__.copy() for r in self.rows]


def _ratio(num: float, den: float) -> float:
    if den == 0:
        return float("nan") if num == 0 else float("inf")
    return num / den


def iteration_ratio_table(based: Sequence[IterationStats],
                          avoiding: Sequence[IterationStats]) -> RatioTable:
    if len(based) != len(avoiding):
        raise ValueError(f"iteration counts differ: {len(based)} branch-based vs "
                         f"{len(avoiding)} branch-avoiding")
    if not based:
        raise ValueError("no iterations to compare")
    fastest = min(s.wall_time for s in based)
    rows = []
    for b, a in zip(based, avoiding):
        rows.append(RatioRow(
            b.index, b.wall_time, a.wall_time, b.branches, a.branches,
            b.mispredictions, a.mispredictions, b.stores, a.stores,
            _ratio(b.wall_time, fastest), _ratio(a.wall_time, fastest),
            _ratio(b.branches, a.branches), _ratio(b.mispredictions, a.mispredictions),
            _ratio(a.stores, b.stores)))
    keys = ("time_based", "time_avoiding", "branches_based", "branches_avoiding",
            "mispredictions_based", "mispredictions_avoiding", "stores_based", "stores_avoiding")
    totals = {k: sum(getattr(r, k) for r in rows) for k in keys}
    speedup = _ratio(totals["time_based"], totals["time_avoiding"])
    return RatioTable(tuple(rows), totals, speedup)


def timed_iterations(algorithm: Callable, *args, repeats: int = 5,
                     clock: Callable[[], float] = time.perf_counter) -> list[float]:
    """Per-iteration wall times: median over ``repeats`` uninstrumented runs.

    One extra warm-up run is discarded, and the garbage collector is paused
    while timing.
    """
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    runs = []
    was_enabled = gc.isenabled()
    gc.disable()
    try:
        for i in range(repeats + 1):
            result = algorithm(*args, recorder=NullRecorder(), clock=clock)
            stats = getattr(result, "per_iteration", None) or result.per_level
            if i:
                runs.append([s.wall_time for s in stats])
    finally:
        if was_enabled:
            gc.enable()
    if any(len(r) != len(runs[0]) for r in runs):
        raise RuntimeError("iteration count varied between repetitions")
    return [statistics.median(col) for col in zip(*runs)]


def with_wall_times(stats: Sequence[IterationStats], times: Sequence[float]) -> list[IterationStats]:
    """Replace wall times (e.g. instrumented ones) with separately measured ones."""
    if len(stats) != len(times):
        raise ValueError("one time per iteration is required")
    return [IterationStats(s.index, t, s.ops, s.branches, s.mispredictions, s.loads,
                           s.stores, s.edges_traversed, s.cmovs)
            for s, t in zip(stats, times)]
