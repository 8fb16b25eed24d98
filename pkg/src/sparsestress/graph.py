"""Immutable undirected graphs, edge-list / MatrixMarket IO, generators and statistics."""

from __future__ import annotations

import io
import re
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, shortest_path

from .errors import (
    DisconnectedGraphError,
    GraphParseError,
    GraphValidationError,
    SizeError,
    UnsupportedFormatError,
)

MAX_GENERATED_NODES = 50_000_000


@dataclass(frozen=True, eq=False)
class Graph:
    """Simple undirected graph stored in CSR form.

    ``indptr``/``indices``/``lengths`` hold both directions of every edge;
    neighbor lists are sorted by id.  ``labels`` maps dense ids back to the
    external ids seen on input.
    """

    indptr: np.ndarray
    indices: np.ndarray
    lengths: np.ndarray
    labels: tuple = field(default=())

    def __post_init__(self):
        for arr in (self.indptr, self.indices, self.lengths):
            arr.setflags(write=False)
        if not self.labels:
            object.__setattr__(self, "labels", tuple(range(self.node_count)))

    @property
    def node_count(self) -> int:
        return len(self.indptr) - 1

    @property
    def edge_count(self) -> int:
        return len(self.indices) // 2

    @property
    def is_weighted(self) -> bool:
        return bool(np.any(self.lengths != 1.0))

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def neighbor_lengths(self, i: int) -> np.ndarray:
        return self.lengths[self.indptr[i]:self.indptr[i + 1]]

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def edges(self):
        """Yield ``(u, v, length)`` once per undirected edge with ``u < v``."""
        for u in range(self.node_count):
            lo, hi = self.indptr[u], self.indptr[u + 1]
            for v, w in zip(self.indices[lo:hi], self.lengths[lo:hi]):
                if u < v:
                    yield int(u), int(v), float(w)

    def edge_arrays(self):
        """Return ``(src, dst, length)`` arrays with ``src < dst``."""
        src = np.repeat(np.arange(self.node_count), self.degrees())
        mask = src < self.indices
        return src[mask], self.indices[mask].copy(), self.lengths[mask].copy()

    def to_csr(self) -> csr_matrix:
        n = self.node_count
        return csr_matrix((self.lengths, self.indices, self.indptr), shape=(n, n))

    def is_connected(self) -> bool:
        if self.node_count <= 1:
            return True
        ncomp, _ = connected_components(self.to_csr(), directed=False)
        return ncomp == 1

    def __repr__(self):
        return f"Graph(n={self.node_count}, m={self.edge_count}, weighted={self.is_weighted})"


@dataclass(frozen=True)
class GraphStats:
    n: int
    m: int
    min_degree: int
    max_degree: int
    diameter: float
    weighted: bool

    def format(self) -> str:
        diam = int(self.diameter) if float(self.diameter).is_integer() else self.diameter
        return (
            f"n={self.n} m={self.m} min_deg={self.min_degree} "
            f"max_deg={self.max_degree} diam={diam} weighted={str(self.weighted).lower()}"
        )


def from_edges(n: int, edges: Iterable[tuple], labels: Sequence | None = None) -> Graph:
    """Build a graph on ``n`` nodes from ``(u, v[, length])`` tuples.

    Self-loops are dropped and for duplicate edges the first length wins.
    """
    seen = {}
    for e in edges:
        u, v = int(e[0]), int(e[1])
        w = float(e[2]) if len(e) > 2 else 1.0
        if not (0 <= u < n and 0 <= v < n):
            raise GraphValidationError(f"edge ({u}, {v}) out of range for n={n}")
        if not np.isfinite(w) or w <= 0:
            raise GraphValidationError(f"edge ({u}, {v}) has non-positive length {w}")
        if u == v:
            continue
        key = (u, v) if u < v else (v, u)
        if key not in seen:
            seen[key] = w
    return _build(n, seen, labels)


def _build(n: int, edge_map: dict, labels) -> Graph:
    if edge_map:
        uv = np.array(list(edge_map.keys()), dtype=np.int64)
        w = np.fromiter(edge_map.values(), dtype=np.float64, count=len(edge_map))
    else:
        uv = np.empty((0, 2), dtype=np.int64)
        w = np.empty(0)
    src = np.concatenate([uv[:, 0], uv[:, 1]])
    dst = np.concatenate([uv[:, 1], uv[:, 0]])
    ww = np.concatenate([w, w])
    order = np.lexsort((dst, src))
    src, dst, ww = src[order], dst[order], ww[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, src + 1, 1)
    np.cumsum(indptr, out=indptr)
    return Graph(indptr, dst.astype(np.int64), ww.astype(np.float64),
                 tuple(labels) if labels is not None else ())


def _as_text(data) -> str:
    if isinstance(data, (bytes, bytearray)):
        return data.decode("utf-8")
    if hasattr(data, "read"):
        return _as_text(data.read())
    return data


def parse_edge_list(data) -> Graph:
    """Parse ``u v [length]`` lines; ``#`` starts a comment line.

    External ids are compacted to ``0..n-1`` in order of first appearance.
    """
    text = _as_text(data)
    ids: dict[int, int] = {}
    edges = []
    for lineno, raw in enumerate(io.StringIO(text), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tok = line.split()
        if len(tok) not in (2, 3):
            raise GraphParseError(f"expected 'u v [length]', got {line!r}", lineno)
        try:
            u, v = int(tok[0]), int(tok[1])
        except ValueError:
            raise GraphParseError(f"node ids must be integers: {line!r}", lineno) from None
        if u < 0 or v < 0:
            raise GraphParseError(f"node ids must be non-negative: {line!r}", lineno)
        w = 1.0
        if len(tok) == 3:
            try:
                w = float(tok[2])
            except ValueError:
                raise GraphParseError(f"bad edge length {tok[2]!r}", lineno) from None
            if not np.isfinite(w) or w <= 0:
                raise GraphValidationError(f"edge length must be positive, got {tok[2]}", lineno)
        for x in (u, v):
            if x not in ids:
                ids[x] = len(ids)
        edges.append((ids[u], ids[v], w))
    return from_edges(len(ids), edges, labels=list(ids))


_MM_HEADER = re.compile(r"%%MatrixMarket\s+matrix\s+(\w+)\s+(\w+)\s+(\w+)", re.I)


def parse_matrix_market(data) -> Graph:
    """Read a coordinate MatrixMarket file as an unweighted pattern graph."""
    text = _as_text(data)
    lines = text.splitlines()
    if not lines:
        raise UnsupportedFormatError("empty MatrixMarket input", 1)
    m = _MM_HEADER.match(lines[0].strip())
    if not m:
        raise UnsupportedFormatError("missing %%MatrixMarket header", 1)
    fmt, field_, _symmetry = (s.lower() for s in m.groups())
    if fmt != "coordinate":
        raise UnsupportedFormatError(f"unsupported MatrixMarket format {fmt!r}", 1)
    if field_ == "complex":
        raise UnsupportedFormatError("complex matrices are not supported", 1)

    ids: dict[int, int] = {}
    edges = []
    size_seen = False
    for lineno, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        tok = line.split()
        try:
            if not size_seen:
                if len(tok) != 3:
                    raise GraphParseError("expected 'rows cols nnz' size line", lineno)
                [int(t) for t in tok]
                size_seen = True
                continue
            if len(tok) < 2:
                raise GraphParseError(f"bad entry {line!r}", lineno)
            r, c = int(tok[0]), int(tok[1])
        except ValueError:
            raise GraphParseError(f"bad entry {line!r}", lineno) from None
        for x in (r, c):
            if x not in ids:
                ids[x] = len(ids)
        edges.append((ids[r], ids[c]))
    return from_edges(len(ids), edges, labels=list(ids))


def read_graph(path, fmt: str | None = None) -> Graph:
    if fmt is None:
        fmt = "mtx" if str(path).endswith(".mtx") else "el"
    with open(path, "rb") as fh:
        data = fh.read()
    if fmt == "mtx":
        return parse_matrix_market(data)
    if fmt == "el":
        return parse_edge_list(data)
    raise UnsupportedFormatError(f"unknown graph format {fmt!r}")


def format_edge_list(g: Graph) -> str:
    out = io.StringIO()
    weighted = g.is_weighted
    rows = []
    for u, v, w in g.edges():
        a, b = sorted((g.labels[u], g.labels[v]))
        rows.append((a, b, w))
    # ordering by external id keeps the text independent of internal numbering
    rows.sort(key=lambda r: (r[0], r[1]))
    for a, b, w in rows:
        out.write(f"{a} {b} {w!r}\n" if weighted else f"{a} {b}\n")
    return out.getvalue()


def write_edge_list(g: Graph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_edge_list(g))


def induced_subgraph(g: Graph, nodes: Sequence[int]) -> Graph:
    nodes = sorted(int(v) for v in nodes)
    remap = {v: i for i, v in enumerate(nodes)}
    edges = [(remap[u], remap[v], w) for u, v, w in g.edges() if u in remap and v in remap]
    return from_edges(len(nodes), edges, labels=[g.labels[v] for v in nodes])


def largest_component(g: Graph) -> Graph:
    """Largest connected component; ties go to the component holding the smallest id."""
    n = g.node_count
    if n == 0:
        return g
    ncomp, comp = connected_components(g.to_csr(), directed=False)
    if ncomp == 1:
        return g
    sizes = np.bincount(comp, minlength=ncomp)
    # component labels from scipy are assigned in order of smallest member id
    first = np.full(ncomp, n, dtype=np.int64)
    np.minimum.at(first, comp, np.arange(n))
    best = min(range(ncomp), key=lambda c: (-sizes[c], first[c]))
    return induced_subgraph(g, np.flatnonzero(comp == best))


def _check_size(n: int) -> None:
    if n < 1:
        raise SizeError("graph sizes must be >= 1")
    if n > MAX_GENERATED_NODES:
        raise SizeError(f"requested {n} nodes exceeds the cap of {MAX_GENERATED_NODES}")


def path_graph(n: int) -> Graph:
    _check_size(n)
    return from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    _check_size(n)
    if n < 3:
        raise SizeError("a cycle needs at least 3 nodes")
    return from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def grid_graph(a: int, b: int) -> Graph:
    _check_size(a)
    _check_size(b)
    _check_size(a * b)
    edges = []
    for r in range(a):
        for c in range(b):
            v = r * b + c
            if c + 1 < b:
                edges.append((v, v + 1))
            if r + 1 < a:
                edges.append((v, v + b))
    return from_edges(a * b, edges)


def complete_binary_tree(depth: int) -> Graph:
    """Heap-numbered complete binary tree (root 0), i.e. BFS order."""
    if depth < 0 or depth > 40:
        raise SizeError(f"depth must be in 0..40, got {depth}")
    n = 2 ** (depth + 1) - 1
    _check_size(n)
    return from_edges(n, [((v - 1) // 2, v) for v in range(1, n)])


def star_graph(leaves: int) -> Graph:
    """Center 0 with ``leaves`` leaves numbered 1..leaves."""
    if leaves < 0:
        raise SizeError("leaf count must be >= 0")
    _check_size(leaves + 1)
    return from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


GENERATORS = {
    "path": path_graph,
    "cycle": cycle_graph,
    "grid": grid_graph,
    "btree": complete_binary_tree,
    "complete_binary_tree": complete_binary_tree,
    "star": star_graph,
}


def generate(kind: str, *params: int) -> Graph:
    try:
        fn = GENERATORS[kind]
    except KeyError:
        raise SizeError(f"unknown generator {kind!r}") from None
    return fn(*params)


def hop_bfs(g: Graph, source: int, limit: int | None = None) -> np.ndarray:
    """Hop distances from ``source`` (``-1`` = unreached / beyond ``limit``)."""
    dist = np.full(g.node_count, -1, dtype=np.int64)
    dist[source] = 0
    q = deque([source])
    while q:
        u = q.popleft()
        du = dist[u]
        if limit is not None and du >= limit:
            continue
        for v in g.indices[g.indptr[u]:g.indptr[u + 1]]:
            if dist[v] < 0:
                dist[v] = du + 1
                q.append(v)
    return dist


def stats(g: Graph) -> GraphStats:
    """Exact degree range and diameter via all-pairs shortest paths."""
    n = g.node_count
    deg = g.degrees()
    if n == 1:
        diameter = 0.0
    else:
        if not g.is_connected():
            raise DisconnectedGraphError("graph is disconnected: diameter is infinite")
        csr = g.to_csr()
        unweighted = not g.is_weighted
        diameter = 0.0
        for lo in range(0, n, 256):
            d = shortest_path(csr, directed=False, unweighted=unweighted,
                              indices=np.arange(lo, min(n, lo + 256)))
            diameter = max(diameter, float(d.max()))
    return GraphStats(
        n=n,
        m=g.edge_count,
        min_degree=int(deg.min()) if n else 0,
        max_degree=int(deg.max()) if n else 0,
        diameter=diameter,
        weighted=g.is_weighted,
    )
