"""Layout quality measures: stress, optimal rescaling, Procrustes statistic,
Gabriel-graph neighborhood similarity, convex-hull visual error and
distance-error histograms.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .distances import all_pairs, mssp_table
from .errors import ConfigError, DegenerateLayoutError
from .geometry import count_in_hull, gabriel_graph, identical_tolerance
from .graph import Graph

PERCENTILES = (5, 25, 50, 75, 95)
HOP_CHUNK = 256


@dataclass(frozen=True, eq=False)
class PairTable:
    """Node pairs ``(i, j)`` with their graph-theoretic distance ``d``."""

    i: np.ndarray
    j: np.ndarray
    d: np.ndarray
    n: int
    sampled: bool = False

    @classmethod
    def from_matrix(cls, dist: np.ndarray) -> "PairTable":
        dist = np.asarray(dist, dtype=np.float64)
        if dist.ndim != 2 or dist.shape[0] != dist.shape[1]:
            raise ValueError("distance matrix must be square")
        n = len(dist)
        i, j = np.triu_indices(n, 1)
        return cls(i, j, dist[i, j], n)

    @classmethod
    def from_graph(cls, g: Graph) -> "PairTable":
        return cls.from_matrix(all_pairs(g))

    @classmethod
    def sample(cls, g: Graph, pairs: int, seed=None) -> "PairTable":
        """All pairs from a seeded random subset of source nodes.

        Enough sources are drawn to cover roughly ``pairs`` pairs, so the
        cost is one shortest-path run per source rather than APSP.
        """
        n = g.node_count
        rng = np.random.default_rng(seed)
        sources = max(1, min(n, math.ceil(pairs / max(n - 1, 1))))
        src = np.sort(rng.choice(n, size=sources, replace=False))
        d = mssp_table(g, src)
        ii = np.repeat(src, n)
        jj = np.tile(np.arange(n), len(src))
        dd = d.ravel()
        keep = ii != jj
        return cls(ii[keep], jj[keep], dd[keep], n, sampled=True)

    @property
    def size(self) -> int:
        return len(self.d)


def _weights(d: np.ndarray, w) -> np.ndarray:
    return 1.0 / (d * d) if w is None else np.asarray(w, dtype=np.float64)


def _drawn(x: np.ndarray, pt: PairTable) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if len(x) != pt.n:
        raise ValueError(f"layout has {len(x)} rows but distances cover {pt.n} nodes")
    return np.linalg.norm(x[pt.i] - x[pt.j], axis=1)


def _pairs(dist) -> PairTable:
    return dist if isinstance(dist, PairTable) else PairTable.from_matrix(dist)


def stress(x: np.ndarray, dist, w=None) -> float:
    """Sum of ``w_ij (|x_i - x_j| - d_ij)^2`` over pairs (``w = 1/d^2`` by default)."""
    pt = _pairs(dist)
    delta = _drawn(x, pt)
    r = delta - pt.d
    return float((_weights(pt.d, w) * r * r).sum())


def optimal_rescale(x: np.ndarray, dist, w=None) -> tuple[float, float]:
    """Scale ``c > 0`` minimizing the stress of ``c * x`` and that stress."""
    pt = _pairs(dist)
    delta = _drawn(x, pt)
    ww = _weights(pt.d, w)
    den = (ww * delta * delta).sum()
    num = (ww * pt.d * delta).sum()
    if not den > 0 or not num > 0:
        raise DegenerateLayoutError("layout is degenerate: no positive rescaling exists")
    c = num / den
    r = c * delta - pt.d
    return float(c), float((ww * r * r).sum())


def normalized_stress(x: np.ndarray, dist, w=None) -> float:
    pt = _pairs(dist)
    if pt.n < 2:
        raise ConfigError("normalized stress needs at least two nodes")
    _, s = optimal_rescale(x, pt, w)
    if pt.sampled:
        # mean over the sampled pairs estimates the per-pair average
        return s / pt.size
    return s / (pt.n * (pt.n - 1) / 2)


def procrustes_statistic(x: np.ndarray, y: np.ndarray) -> float:
    """Residual after the best translation, rotation and dilation of ``y`` onto ``x``.

    Reflections are not allowed, so a mirrored copy scores above zero.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError(f"layout shapes differ: {x.shape} vs {y.shape}")
    xc = x - x.mean(axis=0)
    yc = y - y.mean(axis=0)
    sx = (xc * xc).sum()
    sy = (yc * yc).sum()
    deg_x = sx <= 1e-300
    deg_y = sy <= 1e-300
    if deg_x and deg_y:
        return 0.0
    if deg_x or deg_y:
        return 1.0
    u, s, vt = np.linalg.svd(xc.T @ yc)
    if np.linalg.det(u) * np.linalg.det(vt) < 0:
        s[-1] = -s[-1]
    r2 = 1.0 - s.sum() ** 2 / (sx * sy)
    return float(min(1.0, max(0.0, r2)))


def _edges_to_csr(edges: np.ndarray, n: int) -> csr_matrix:
    e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    rows = np.concatenate([e[:, 0], e[:, 1]])
    cols = np.concatenate([e[:, 1], e[:, 0]])
    return csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))


def _hop_chunks(adj: csr_matrix, limit: int):
    """Yield ``(rows, hop_matrix)``; unreached entries are ``inf``."""
    n = adj.shape[0]
    for lo in range(0, n, HOP_CHUNK):
        rows = np.arange(lo, min(n, lo + HOP_CHUNK))
        h = dijkstra(adj, directed=False, unweighted=True, indices=rows, limit=limit)
        yield rows, np.atleast_2d(h)


def _aggregate(values: np.ndarray, how: str) -> float:
    if how == "mean":
        return float(values.mean())
    if how == "median":
        return float(np.median(values))
    raise ConfigError(f"unknown aggregate {how!r}")


def gabriel_jaccard(x_ref: np.ndarray, x_cmp: np.ndarray, max_hop: int,
                    aggregate: str = "mean") -> list[float]:
    """Per-hop similarity of node neighborhoods in two Gabriel graphs.

    Entry ``k-1`` aggregates, over all nodes, the Jaccard coefficient of the
    ``<= k``-hop neighborhoods (node excluded) in the two Gabriel graphs.
    """
    x_ref = np.asarray(x_ref, dtype=np.float64)
    x_cmp = np.asarray(x_cmp, dtype=np.float64)
    if x_ref.shape[0] != x_cmp.shape[0]:
        raise ValueError("layouts cover different node sets")
    n = len(x_ref)
    a = _edges_to_csr(gabriel_graph(x_ref), n)
    b = _edges_to_csr(gabriel_graph(x_cmp), n)
    per_node = np.empty((max_hop, n))
    for (rows, ha), (_, hb) in zip(_hop_chunks(a, max_hop), _hop_chunks(b, max_hop)):
        for k in range(1, max_hop + 1):
            na = (ha > 0) & (ha <= k)
            nb = (hb > 0) & (hb <= k)
            inter = (na & nb).sum(axis=1)
            union = (na | nb).sum(axis=1)
            per_node[k - 1, rows] = np.where(union > 0, inter / np.maximum(union, 1), 1.0)
    return [_aggregate(per_node[k], aggregate) for k in range(max_hop)]


def hull_error(g: Graph, x: np.ndarray, max_hop: int, aggregate: str = "mean") -> list:
    """Share of non-neighbors drawn inside the hull of each ``<= k``-hop neighborhood.

    Returns one value per ``k = 1..max_hop``; ``None`` where no node has any
    node outside its neighborhood.
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    n = g.node_count
    if x.shape != (n, 2):
        raise ConfigError("hull error needs a two-dimensional layout of the graph")
    tol = identical_tolerance(x)
    adj = csr_matrix((np.ones_like(g.lengths), g.indices, g.indptr), shape=(n, n))
    errors = [[] for _ in range(max_hop)]
    for rows, hops in _hop_chunks(adj, max_hop):
        for r, v in enumerate(rows):
            h = hops[r]
            for k in range(1, max_hop + 1):
                inside = np.flatnonzero(h <= k)
                outside = np.flatnonzero(~(h <= k))
                if outside.size == 0:
                    continue
                cnt = count_in_hull(x, inside, outside, tol)
                errors[k - 1].append((v, cnt / outside.size))
    out = []
    for k in range(max_hop):
        if not errors[k]:
            out.append(None)
        else:
            vals = np.array([e for _, e in sorted(errors[k])])
            out.append(_aggregate(vals, aggregate))
    return out


@dataclass
class HistogramBin:
    lo: float
    hi: float
    count: int
    min: float
    p5: float
    p25: float
    median: float
    p75: float
    p95: float
    max: float


def error_histogram(x: np.ndarray, dist, weighted: bool, bins: int = 1000) -> list[HistogramBin]:
    """Summaries of ``|x_i - x_j| - d_ij`` grouped by graph distance.

    Unweighted graphs get one bin per integer distance; weighted graphs get
    ``bins`` equal-width bins over ``(0, max d]`` (empty bins are omitted).
    """
    pt = _pairs(dist)
    err = _drawn(x, pt) - pt.d
    if pt.size == 0:
        return []
    if not weighted:
        keys = np.rint(pt.d).astype(np.int64)
        edges = None
    else:
        top = pt.d.max()
        keys = np.minimum(np.ceil(pt.d / top * bins).astype(np.int64) - 1, bins - 1)
        keys = np.maximum(keys, 0)
        edges = np.linspace(0.0, top, bins + 1)
    order = np.argsort(keys, kind="stable")
    keys, err = keys[order], err[order]
    uniq, starts = np.unique(keys, return_index=True)
    stops = np.append(starts[1:], len(keys))
    out = []
    for key, a, b in zip(uniq, starts, stops):
        e = err[a:b]
        p5, p25, p50, p75, p95 = np.percentile(e, PERCENTILES)
        lo, hi = (float(key), float(key)) if edges is None else (float(edges[key]), float(edges[key + 1]))
        out.append(HistogramBin(lo, hi, int(b - a), float(e.min()), float(p5), float(p25),
                                float(p50), float(p75), float(p95), float(e.max())))
    return out


@dataclass
class MetricReport:
    raw_stress: float
    optimal_scale: float
    rescaled_stress: float
    normalized_stress: float
    procrustes: float | None = None
    gabriel_jaccard: list = field(default_factory=list)
    hull_error: list = field(default_factory=list)
    error_histogram: list = field(default_factory=list)

    def scalars(self) -> list[tuple[str, float]]:
        rows = [
            ("raw_stress", self.raw_stress),
            ("optimal_scale", self.optimal_scale),
            ("rescaled_stress", self.rescaled_stress),
            ("normalized_stress", self.normalized_stress),
        ]
        if self.procrustes is not None:
            rows.append(("procrustes", self.procrustes))
        return rows

    def write_csv(self, fh) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["metric", "key", "value"])
        for key, val in self.scalars():
            w.writerow(["metric", key, repr(float(val))])
        w.writerow(["curve", "k", "value"])
        for name, curve in (("gabriel_jaccard", self.gabriel_jaccard), ("hull_error", self.hull_error)):
            for k, val in enumerate(curve, start=1):
                w.writerow([name, k, "" if val is None else repr(float(val))])
        w.writerow(["hist", "bin_lo", "bin_hi", "min", "p5", "p25", "median", "p75", "p95", "max"])
        for b in self.error_histogram:
            w.writerow(["hist"] + [repr(float(v)) for v in
                                   (b.lo, b.hi, b.min, b.p5, b.p25, b.median, b.p75, b.p95, b.max)])


def evaluate(g: Graph, x: np.ndarray, x_ref: np.ndarray | None = None, max_hop: int = 5,
             bins: int = 1000, sample_pairs: int | None = None, seed=None,
             aggregate: str = "mean") -> MetricReport:
    """Full metric report for layout ``x`` (compared against ``x_ref`` if given)."""
    if sample_pairs:
        pt = PairTable.sample(g, sample_pairs, seed)
    else:
        pt = PairTable.from_graph(g)
    raw = stress(x, pt)
    c, rescaled = optimal_rescale(x, pt)
    rep = MetricReport(
        raw_stress=raw,
        optimal_scale=c,
        rescaled_stress=rescaled,
        normalized_stress=normalized_stress(x, pt),
        error_histogram=error_histogram(x, pt, g.is_weighted, bins),
    )
    if x_ref is not None:
        rep.procrustes = procrustes_statistic(x_ref, x)
        if max_hop > 0:
            rep.gabriel_jaccard = gabriel_jaccard(x_ref, x, max_hop, aggregate)
    if max_hop > 0 and np.asarray(x).shape[1] == 2:
        rep.hull_error = hull_error(g, x, max_hop, aggregate)
    return rep
