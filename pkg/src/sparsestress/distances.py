"""Pivot shortest-path tables, the closest-pivot partition and adapted weights."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.sparse.csgraph import dijkstra, shortest_path

from .errors import ConfigError, DegenerateDistanceError, DisconnectedGraphError
from .graph import Graph


@dataclass(frozen=True, eq=False)
class PivotDistances:
    pivots: np.ndarray  # (k,) node ids
    dist: np.ndarray  # (k, n)

    @property
    def k(self) -> int:
        return len(self.pivots)

    @property
    def n(self) -> int:
        return self.dist.shape[1]


@dataclass(frozen=True, eq=False)
class Regions:
    """Closest-pivot partition.

    ``member_ptr``/``members``/``sorted_member_dist`` are CSR-style: the
    members of pivot index ``p`` are ``members[member_ptr[p]:member_ptr[p+1]]``
    and their distances to ``p`` (ascending) sit at the same offsets of
    ``sorted_member_dist``.
    """

    owner: np.ndarray  # (n,) pivot index per node
    member_ptr: np.ndarray  # (k+1,)
    members: np.ndarray  # (n,)
    sorted_member_dist: np.ndarray  # (n,)

    def region(self, p: int) -> np.ndarray:
        return self.members[self.member_ptr[p]:self.member_ptr[p + 1]]

    def region_dists(self, p: int) -> np.ndarray:
        return self.sorted_member_dist[self.member_ptr[p]:self.member_ptr[p + 1]]

    def sizes(self) -> np.ndarray:
        return np.diff(self.member_ptr)


def sssp(g: Graph, source: int) -> np.ndarray:
    return mssp_table(g, [source])[0]


def mssp_table(g: Graph, sources: Sequence[int]) -> np.ndarray:
    """``len(sources) x n`` shortest-path distances (BFS when all lengths are 1)."""
    sources = np.asarray(sources, dtype=np.int64)
    if g.node_count == 1:
        return np.zeros((len(sources), 1))
    csr = g.to_csr()
    if g.is_weighted:
        d = dijkstra(csr, directed=False, indices=sources)
    else:
        d = shortest_path(csr, directed=False, unweighted=True, indices=sources)
    d = np.atleast_2d(d)
    if not np.all(np.isfinite(d)):
        raise DisconnectedGraphError("some nodes are unreachable from the pivots")
    return d


def mssp(g: Graph, pivots: Sequence[int]) -> PivotDistances:
    pivots = np.asarray(pivots, dtype=np.int64)
    if pivots.size == 0:
        raise ConfigError("at least one pivot is required")
    if len(np.unique(pivots)) != len(pivots):
        raise ConfigError("pivots must be distinct")
    if pivots.min() < 0 or pivots.max() >= g.node_count:
        raise ConfigError("pivot id out of range")
    dist = mssp_table(g, pivots)
    pivots.setflags(write=False)
    dist.setflags(write=False)
    return PivotDistances(pivots, dist)


def all_pairs(g: Graph) -> np.ndarray:
    return mssp_table(g, np.arange(g.node_count))


def build_regions(pd: PivotDistances) -> Regions:
    """Assign every node to its closest pivot.

    Nodes are visited by ascending distance to their closest pivot (then by
    id); a node equidistant to several pivots joins the one whose region is
    currently smallest, then the lowest pivot index.
    """
    k, n = pd.dist.shape
    dist = pd.dist
    mind = dist.min(axis=0)
    argmin = dist.argmin(axis=0)
    ntied = (dist == mind).sum(axis=0)

    owner = np.full(n, -1, dtype=np.int64)
    size = np.zeros(k, dtype=np.int64)
    owner[pd.pivots] = np.arange(k)
    size[:] = 1

    order = np.lexsort((np.arange(n), mind))
    for j in order:
        if owner[j] >= 0:
            continue
        if ntied[j] == 1:
            p = argmin[j]
        else:
            cand = np.flatnonzero(dist[:, j] == mind[j])
            p = cand[np.argmin(size[cand])]
        owner[j] = p
        size[p] += 1

    d_own = dist[owner, np.arange(n)]
    by_region = np.lexsort((d_own, owner))
    member_ptr = np.zeros(k + 1, dtype=np.int64)
    np.cumsum(size, out=member_ptr[1:])
    return Regions(owner, member_ptr, by_region.astype(np.int64), d_own[by_region])


def region_support(regions: Regions, p: int, d_ip: float) -> int:
    """Number of members ``j`` of region ``p`` with ``d_jp <= d_ip / 2``."""
    return int(np.searchsorted(regions.region_dists(p), d_ip / 2.0, side="right"))


def adapted_weight(i: int, p: int, pd: PivotDistances, regions: Regions) -> float:
    d = pd.dist[p, i]
    if d <= 0:
        raise DegenerateDistanceError(f"node {i} coincides with pivot index {p} (distance {d})")
    return region_support(regions, p, d) / (d * d)


def adapted_weight_table(pd: PivotDistances, regions: Regions) -> np.ndarray:
    """All ``w'_ip`` as a ``k x n`` table; entries with ``d_ip = 0`` are 0."""
    k, n = pd.dist.shape
    w = np.zeros((k, n))
    for p in range(k):
        d = pd.dist[p]
        s = np.searchsorted(regions.region_dists(p), d / 2.0, side="right")
        pos = d > 0
        w[p, pos] = s[pos] / (d[pos] ** 2)
    return w


def write_regions_csv(path, g: Graph, pd: PivotDistances, regions: Regions) -> None:
    n = pd.n
    d_own = pd.dist[regions.owner, np.arange(n)]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["node", "owner_pivot", "dist_to_owner"])
        for j in range(n):
            w.writerow([g.labels[j], g.labels[pd.pivots[regions.owner[j]]], repr(float(d_own[j]))])
