"""Trace-driven branch prediction and operation counting.

Instrumented algorithms register one :class:`BranchSite` per static
conditional branch and report every dynamic outcome to a recorder, along
with array loads, stores, conditional moves and scalar arithmetic.  Each site
owns a private 2-bit predictor state that is never evicted.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field

from .predictor import NEXT_STATE, PredictorState


class BranchSite:
    __slots__ = ("id", "label", "state", "evaluations", "taken", "mispredictions")

    def __init__(self, id: int, label: str, state: PredictorState):
        self.id = id
        self.label = label
        self.state = int(state)
        self.evaluations = 0
        self.taken = 0
        self.mispredictions = 0

    def __repr__(self):
        return (f"BranchSite({self.label!r}, state={PredictorState(self.state).name}, "
                f"evaluations={self.evaluations}, mispredictions={self.mispredictions})")


@dataclass(frozen=True)
class SiteStats:
    label: str
    state: str
    evaluations: int
    taken: int
    mispredictions: int


@dataclass(frozen=True)
class Snapshot:
    """Immutable view of a recorder's counters."""

    sites: tuple[SiteStats, ...] = ()
    loads: int = 0
    stores: int = 0
    cmovs: int = 0
    arith: int = 0
    stores_by_array: dict = field(default_factory=dict)
    loads_by_array: dict = field(default_factory=dict)

    @property
    def branches(self) -> int:
        return sum(s.evaluations for s in self.sites)

    @property
    def mispredictions(self) -> int:
        return sum(s.mispredictions for s in self.sites)

    @property
    def ops(self) -> int:
        """Instruction proxy: every counted operation."""
        return self.loads + self.stores + self.branches + self.cmovs + self.arith

    def site(self, label: str) -> SiteStats | None:
        for s in self.sites:
            if s.label == label:
                return s
        return None

    def stores_to(self, array: str) -> int:
        return self.stores_by_array.get(array, 0)

    def loads_from(self, array: str) -> int:
        return self.loads_by_array.get(array, 0)

    def __sub__(self, other: "Snapshot") -> "Snapshot":
        before = {s.label: s for s in other.sites}
        sites = []
        for s in self.sites:
            b = before.get(s.label)
            if b is None:
                sites.append(s)
            else:
                sites.append(SiteStats(s.label, s.state, s.evaluations - b.evaluations,
                                       s.taken - b.taken, s.mispredictions - b.mispredictions))
        return Snapshot(
            tuple(sites), self.loads - other.loads, self.stores - other.stores,
            self.cmovs - other.cmovs, self.arith - other.arith,
            _diff(self.stores_by_array, other.stores_by_array),
            _diff(self.loads_by_array, other.loads_by_array))

    def dominates(self, other: "Snapshot") -> bool:
        """True when every counter here is >= its counterpart in ``other``."""
        mine = {s.label: s for s in self.sites}
        for s in other.sites:
            m = mine.get(s.label)
            if m is None or m.evaluations < s.evaluations or m.taken < s.taken \
                    or m.mispredictions < s.mispredictions:
                return False
        scalars = ("loads", "stores", "cmovs", "arith")
        if any(getattr(self, k) < getattr(other, k) for k in scalars):
            return False
        return all(self.stores_by_array.get(k, 0) >= v for k, v in other.stores_by_array.items()) \
            and all(self.loads_by_array.get(k, 0) >= v for k, v in other.loads_by_array.items())

    def to_dict(self) -> dict:
        return {
            "sites": {s.label: {k: v for k, v in asdict(s).items() if k != "label"}
                      for s in self.sites},
            "branches": self.branches,
            "mispredictions": self.mispredictions,
            "loads": self.loads,
            "stores": self.stores,
            "cmovs": self.cmovs,
            "arith": self.arith,
            "ops": self.ops,
            "loads_by_array": dict(sorted(self.loads_by_array.items())),
            "stores_by_array": dict(sorted(self.stores_by_array.items())),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def csv_rows(self) -> list[list]:
        """One row per site: label, final state, evaluations, taken, mispredictions."""
        return [[s.label, s.state, s.evaluations, s.taken, s.mispredictions] for s in self.sites]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["site", "state", "evaluations", "taken", "mispredictions"])
        writer.writerows(self.csv_rows())
        return buf.getvalue()


def _diff(a: dict, b: dict) -> dict:
    return {k: a.get(k, 0) - b.get(k, 0) for k in set(a) | set(b)}


class TraceRecorder:
    """Simulates one 2-bit predictor per registered site and counts memory traffic."""

    tracing = True

    def __init__(self, initial_state: PredictorState = PredictorState.WEAKLY_NOT_TAKEN):
        self.initial_state = PredictorState(initial_state)
        self._sites: dict[str, BranchSite] = {}
        self.loads = 0
        self.stores = 0
        self.cmovs = 0
        self.arith = 0
        self.loads_by_array: dict[str, int] = {}
        self.stores_by_array: dict[str, int] = {}

    def site(self, label: str) -> BranchSite:
        """Return the site named ``label``, registering it on first use."""
        s = self._sites.get(label)
        if s is None:
            s = self._sites[label] = BranchSite(len(self._sites), label, self.initial_state)
        return s

    @property
    def sites(self) -> tuple[BranchSite, ...]:
        return tuple(self._sites.values())

    def record_branch(self, site: BranchSite, taken: bool) -> None:
        if self._sites.get(site.label) is not site:
            raise KeyError(f"branch site {site.label!r} is not registered with this recorder")
        state = site.state
        site.evaluations += 1
        if taken:
            site.taken += 1
            if state < 2:
                site.mispredictions += 1
            site.state = NEXT_STATE[state][1]
        else:
            if state >= 2:
                site.mispredictions += 1
            site.state = NEXT_STATE[state][0]

    def record_load(self, n: int = 1, array: str | None = None) -> None:
        self.loads += n
        if array is not None:
            self.loads_by_array[array] = self.loads_by_array.get(array, 0) + n

    def record_store(self, n: int = 1, array: str | None = None) -> None:
        self.stores += n
        if array is not None:
            self.stores_by_array[array] = self.stores_by_array.get(array, 0) + n

    def record_cmov(self, n: int = 1) -> None:
        self.cmovs += n

    def record_arith(self, n: int = 1) -> None:
        self.arith += n

    def report(self) -> Snapshot:
        sites = tuple(SiteStats(s.label, PredictorState(s.state).name, s.evaluations,
                                s.taken, s.mispredictions) for s in self._sites.values())
        return Snapshot(sites, self.loads, self.stores, self.cmovs, self.arith,
                        dict(self.stores_by_array), dict(self.loads_by_array))


class NullRecorder:
    """Recorder with the same interface whose operations do nothing; used for timing."""

    tracing = False
    _EMPTY = Snapshot()

    def __init__(self, initial_state: PredictorState = PredictorState.WEAKLY_NOT_TAKEN):
        self.initial_state = PredictorState(initial_state)

    def site(self, label: str) -> BranchSite:
        return BranchSite(-1, label, self.initial_state)

    sites = ()

    def record_branch(self, site, taken) -> None:
        pass

    def record_load(self, n=1, array=None) -> None:
        pass

    def record_store(self, n=1, array=None) -> None:
        pass

    def record_cmov(self, n=1) -> None:
        pass

    def record_arith(self, n=1) -> None:
        pass

    def report(self) -> Snapshot:
        return self._EMPTY


@dataclass(frozen=True)
class IterationStats:
    """Counters for one SV iteration or one BFS level."""

    index: int
    wall_time: float
    ops: int
    branches: int
    mispredictions: int
    loads: int
    stores: int
    edges_traversed: int
    cmovs: int = 0

    @classmethod
    def from_delta(cls, index: int, delta: Snapshot, wall_time: float,
                   edges_traversed: int) -> "IterationStats":
        return cls(index, wall_time, delta.ops, delta.branches, delta.mispredictions,
                   delta.loads, delta.stores, edges_traversed, delta.cmovs)

    def per_edge(self) -> dict[str, float]:
        """T, I, B, M, L, S normalized by the edges traversed in this iteration."""
        if self.edges_traversed <= 0:
            raise ValueError("per-edge normalization needs edges_traversed > 0")
        e = float(self.edges_traversed)
        return {"T": self.wall_time / e, "I": self.ops / e, "B": self.branches / e,
                "M": self.mispredictions / e, "L": self.loads / e, "S": self.stores / e}


class IterationLog:
    """Cuts a recorder's counters into per-iteration deltas.

    Call :meth:`mark` just before the loop test that may open a new
    iteration.  :meth:`finish` closes the last iteration, folding the final
    failing loop test into it.
    """

    def __init__(self, recorder, clock):
        self._rec = recorder
        self._clock = clock
        self._marks: list[tuple[Snapshot, float, int]] = []
        self.edges = 0

    def mark(self) -> None:
        self._marks.append((self._rec.report(), self._clock(), self.edges))

    def drop_last(self) -> None:
        self._marks.pop()

    def finish(self) -> list[IterationStats]:
        end = (self._rec.report(), self._clock(), self.edges)
        bounds = self._marks[1:] + [end]
        stats = []
        for i, ((s0, t0, e0), (s1, t1, e1)) in enumerate(zip(self._marks, bounds)):
            stats.append(IterationStats.from_delta(i, s1 - s0, t1 - t0, e1 - e0))
        return stats
