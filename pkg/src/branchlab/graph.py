"""Compressed-sparse-row graphs: construction, validation, ingestion and generation."""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import TextIO

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, shortest_path


class GraphFormatError(ValueError):
    """Raised when graph text input cannot be parsed.

    ``line`` is the 1-based line number of the offending input line, or
    ``None`` when the problem is not tied to a single line.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class Graph:
    """Immutable CSR adjacency structure.

    ``neighbors[offsets[v]:offsets[v + 1]]`` are the out-neighbors of ``v``,
    sorted ascending.  For undirected graphs every edge appears in both
    directions, so ``num_edges`` counts directed edge slots.
    """

    offsets: np.ndarray
    neighbors: np.ndarray

    def __post_init__(self):
        offsets = np.ascontiguousarray(self.offsets, dtype=np.int64)
        neighbors = np.ascontiguousarray(self.neighbors, dtype=np.int64)
        offsets.setflags(write=False)
        neighbors.setflags(write=False)
        object.__setattr__(self, "offsets", offsets)
        object.__setattr__(self, "neighbors", neighbors)
        self._check_structure()

    def _check_structure(self):
        off, nbr = self.offsets, self.neighbors
        if off.ndim != 1 or off.size < 1:
            raise ValueError("offsets must be a 1-d array of length |V|+1")
        if off[0] != 0 or off[-1] != nbr.size:
            raise ValueError("offsets must start at 0 and end at |E|")
        if np.any(np.diff(off) < 0):
            raise ValueError("offsets must be nondecreasing")
        n = off.size - 1
        if nbr.size and (nbr.min() < 0 or nbr.max() >= n):
            raise ValueError("neighbor id out of range")

    @property
    def num_vertices(self) -> int:
        return self.offsets.size - 1

    @property
    def num_edges(self) -> int:
        return self.neighbors.size

    def degree(self, v: int) -> int:
        return int(self.offsets[v + 1] - self.offsets[v])

    def degrees(self) -> np.ndarray:
        return np.diff(self.offsets)

    def adjacency(self, v: int) -> np.ndarray:
        return self.neighbors[self.offsets[v]:self.offsets[v + 1]]

    def edges(self) -> np.ndarray:
        """All directed edge slots as an ``(|E|, 2)`` array in CSR order."""
        sources = np.repeat(np.arange(self.num_vertices, dtype=np.int64), self.degrees())
        return np.column_stack([sources, self.neighbors])

    def to_edge_list(self) -> "EdgeList":
        return EdgeList(self.num_vertices, [tuple(e) for e in self.edges().tolist()])

    def is_symmetric(self) -> bool:
        e = self.edges()
        n = self.num_vertices
        fwd = np.sort(e[:, 0] * n + e[:, 1])
        rev = np.sort(e[:, 1] * n + e[:, 0])
        return bool(np.array_equal(fwd, rev))

    def validate(self, undirected: bool = True) -> "Graph":
        """Check the CSR invariants (and symmetry when ``undirected``); return self."""
        self._check_structure()
        if undirected and not self.is_symmetric():
            raise ValueError("adjacency is not symmetric")
        return self

    def to_scipy(self) -> csr_matrix:
        n = self.num_vertices
        data = np.ones(self.num_edges, dtype=np.int8)
        return csr_matrix((data, self.neighbors, self.offsets), shape=(n, n))

    def component_labels(self) -> np.ndarray:
        """Weakly connected component index of each vertex (scipy)."""
        _, labels = connected_components(self.to_scipy(), directed=False)
        return labels

    def is_connected(self) -> bool:
        if self.num_vertices <= 1:
            return True
        ncomp, _ = connected_components(self.to_scipy(), directed=False)
        return ncomp == 1

    def to_metis(self) -> str:
        """Serialize an undirected graph in METIS text format (1-based ids)."""
        lines = [f"{self.num_vertices} {self.num_edges // 2}"]
        for v in range(self.num_vertices):
            lines.append(" ".join(str(u + 1) for u in self.adjacency(v).tolist()))
        return "\n".join(lines) + "\n"

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (np.array_equal(self.offsets, other.offsets)
                and np.array_equal(self.neighbors, other.neighbors))

    __hash__ = None


@dataclass
class EdgeList:
    """Ordered (source, target) pairs over ``num_vertices`` vertices."""

    num_vertices: int
    pairs: list[tuple[int, int]] = field(default_factory=list)

    def __post_init__(self):
        n = self.num_vertices
        if n < 0:
            raise ValueError("num_vertices must be nonnegative")
        for u, v in self.pairs:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for {n} vertices")


def _as_stream(source: str | TextIO) -> TextIO:
    return io.StringIO(source) if isinstance(source, str) else source


def load_metis(source: str | TextIO) -> Graph:
    """Parse a METIS/Chaco graph into a validated undirected :class:`Graph`.

    Accepts a string or a text stream.  ``%`` lines are comments; vertex
    weights/sizes and edge weights announced by the ``fmt`` header field are
    skipped.
    """
    stream = _as_stream(source)
    header = None
    lineno = 0
    for raw in stream:
        lineno += 1
        if raw.lstrip().startswith("%") or not raw.strip():
            continue
        header = raw.split()
        break
    if header is None:
        raise GraphFormatError("missing header", lineno or None)
    header_line = lineno
    try:
        fields = [int(tok) for tok in header]
    except ValueError:
        raise GraphFormatError(f"non-integer header {' '.join(header)!r}", header_line) from None
    if len(fields) < 2 or len(fields) > 4 or fields[0] < 0 or fields[1] < 0:
        raise GraphFormatError("header must be '|V| |E| [fmt [ncon]]'", header_line)
    n, m = fields[0], fields[1]
    fmt = f"{fields[2]:03d}" if len(fields) > 2 else "000"
    if len(fmt) != 3 or set(fmt) - {"0", "1"}:
        raise GraphFormatError(f"unsupported fmt field {fields[2]}", header_line)
    has_vsize, has_vweight, has_eweight = (c == "1" for c in fmt)
    ncon = fields[3] if len(fields) > 3 else (1 if has_vweight else 0)

    adjacency: list[list[int]] = []
    line_of: list[int] = []
    for raw in stream:
        lineno += 1
        if raw.lstrip().startswith("%"):
            continue
        if len(adjacency) == n:
            if raw.strip():
                raise GraphFormatError("more adjacency lines than vertices", lineno)
            continue
        try:
            toks = [int(tok) for tok in raw.split()]
        except ValueError:
            raise GraphFormatError("non-integer token", lineno) from None
        toks = toks[int(has_vsize) + (ncon if has_vweight else 0):]
        if has_eweight:
            if len(toks) % 2:
                raise GraphFormatError("odd token count with edge weights", lineno)
            toks = toks[::2]
        for t in toks:
            if not 1 <= t <= n:
                raise GraphFormatError(f"neighbor id {t} out of range 1..{n}", lineno)
        adjacency.append(sorted(t - 1 for t in toks))
        line_of.append(lineno)
    while len(adjacency) < n:
        # trailing isolated vertices may lack their (empty) line entirely
        adjacency.append([])
        line_of.append(lineno)

    degrees = np.fromiter((len(a) for a in adjacency), dtype=np.int64, count=n)
    offsets = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(degrees, out=offsets[1:])
    neighbors = np.fromiter((u for a in adjacency for u in a), dtype=np.int64,
                            count=int(offsets[-1]))
    if offsets[-1] != 2 * m:
        raise GraphFormatError(
            f"header announces {m} edges but adjacency lists hold {offsets[-1]} slots "
            f"(expected {2 * m})", header_line)
    slots = set(zip(np.repeat(np.arange(n), degrees).tolist(), neighbors.tolist()))
    for v, adj in enumerate(adjacency):
        for u in adj:
            if u == v:
                raise GraphFormatError(f"self-loop on vertex {v + 1}", line_of[v])
            if (u, v) not in slots:
                raise GraphFormatError(
                    f"asymmetric adjacency: {v + 1} lists {u + 1} but not vice versa",
                    line_of[v])
    return Graph(offsets, neighbors)


def load_edge_list(source: str | TextIO, num_vertices: int) -> EdgeList:
    """Parse whitespace-separated ``u v`` lines (0-based, ``#`` comments)."""
    pairs = []
    for lineno, raw in enumerate(_as_stream(source), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        toks = line.split()
        if len(toks) != 2:
            raise GraphFormatError(f"expected 2 tokens, got {len(toks)}", lineno)
        try:
            u, v = int(toks[0]), int(toks[1])
        except ValueError:
            raise GraphFormatError("non-integer token", lineno) from None
        for x in (u, v):
            if not 0 <= x < num_vertices:
                raise GraphFormatError(f"vertex id {x} out of range 0..{num_vertices - 1}",
                                       lineno)
        pairs.append((u, v))
    return EdgeList(num_vertices, pairs)


def _csr_from_arrays(n: int, src: np.ndarray, dst: np.ndarray) -> Graph:
    keep = src != dst
    keys = np.unique(src[keep] * n + dst[keep]) if n else np.empty(0, dtype=np.int64)
    src, dst = keys // max(n, 1), keys % max(n, 1)
    offsets = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=offsets[1:])
    return Graph(offsets, dst)


def to_csr(edges: EdgeList, symmetrize: bool = True) -> Graph:
    """Build a CSR graph with sorted, deduplicated adjacencies and no self-loops."""
    n = edges.num_vertices
    arr = np.asarray(edges.pairs, dtype=np.int64).reshape(-1, 2)
    src, dst = arr[:, 0], arr[:, 1]
    if symmetrize:
        src, dst = np.concatenate([src, dst]), np.concatenate([dst, src])
    return _csr_from_arrays(n, src, dst)


def generate_random(num_vertices: int, num_undirected_edges: int, seed: int) -> Graph:
    """Erdős-Rényi G(n, m): ``m`` distinct undirected edges drawn uniformly.

    The result is a pure function of the arguments.
    """
    n, m = num_vertices, num_undirected_edges
    if n < 0 or m < 0:
        raise ValueError("num_vertices and num_undirected_edges must be nonnegative")
    capacity = n * (n - 1) // 2
    if m > capacity:
        raise ValueError(f"{m} edges exceed the simple-graph capacity {capacity} of {n} vertices")
    rng = np.random.default_rng(seed)
    picks = np.sort(rng.choice(capacity, size=m, replace=False)) if m else np.empty(0, np.int64)
    # pair index k enumerates (i, j), i < j, row by row
    row_start = np.arange(n, dtype=np.int64) * (2 * n - np.arange(n, dtype=np.int64) - 1) // 2
    i = np.searchsorted(row_start, picks, side="right") - 1
    j = picks - row_start[i] + i + 1
    src = np.concatenate([i, j]).astype(np.int64)
    dst = np.concatenate([j, i]).astype(np.int64)
    return _csr_from_arrays(n, src, dst)


@dataclass(frozen=True)
class Diameter:
    """Diameter summary.

    ``value`` is the diameter of the largest component (ties broken by the
    smallest vertex id), ``component_max`` the maximum over all components.
    """

    value: int
    disconnected: bool
    component_max: int


def diameter(graph: Graph) -> Diameter:
    n = graph.num_vertices
    if n == 0:
        return Diameter(0, False, 0)
    labels = graph.component_labels()
    sizes = np.bincount(labels)
    mat = graph.to_scipy()
    ecc_by_comp = np.zeros(sizes.size, dtype=np.int64)
    for c in np.flatnonzero(sizes > 1):
        members = np.flatnonzero(labels == c)
        sub = mat[members][:, members]
        dist = shortest_path(sub, method="D", directed=False, unweighted=True)
        ecc_by_comp[c] = int(dist.max())
    # components are numbered in order of their smallest vertex
    largest = int(np.argmax(sizes))
    return Diameter(int(ecc_by_comp[largest]), sizes.size > 1, int(ecc_by_comp.max()))


