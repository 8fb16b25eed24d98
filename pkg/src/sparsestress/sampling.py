"""Pivot sampling strategies.

Every sampler takes an explicit ``numpy.random.Generator`` (or an integer
seed) and never touches global random state.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.sparse.csgraph import dijkstra

from .distances import mssp_table, sssp
from .errors import ConfigError, SizeError
from .graph import Graph

STRATEGIES = (
    "random",
    "mis",
    "maxmin-euclid",
    "maxmin-sp",
    "maxmin-random-sp",
    "kmeans-layout",
    "kmeans-sp",
    "kmeans-maxmin-sp",
)
NEEDS_LAYOUT = {"maxmin-euclid", "kmeans-layout", "kmeans-maxmin-sp"}


@dataclass(frozen=True)
class PivotSet:
    nodes: tuple
    strategy: str
    seed: int | None = None

    def __len__(self):
        return len(self.nodes)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.nodes, dtype=np.int64)


@dataclass(frozen=True)
class SamplerConfig:
    strategy: str
    k: int
    seed: int = 0
    kmeans_max_iters: int = 50
    initial_layout: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ConfigError(f"unknown sampler {self.strategy!r}; choose from {', '.join(STRATEGIES)}")
        if self.kmeans_max_iters < 1:
            raise ConfigError("kmeans_max_iters must be >= 1")
        if self.strategy in NEEDS_LAYOUT and self.initial_layout is None:
            raise ConfigError(f"sampler {self.strategy!r} needs an initial layout")


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _check_k(k: int, n: int) -> None:
    if k < 1:
        raise SizeError(f"k must be >= 1, got {k}")
    if k > n:
        raise SizeError(f"k={k} exceeds the number of nodes n={n}")


def sample_random(g: Graph, k: int, seed=None) -> np.ndarray:
    _check_k(k, g.node_count)
    return _rng(seed).choice(g.node_count, size=k, replace=False).astype(np.int64)


def mis_levels(g: Graph, k: int, seed=None) -> list[np.ndarray]:
    """Greedy maximal-independent-set filtration down to at most ``k`` nodes.

    Level ``i+1`` keeps a maximal subset of level ``i`` whose members are
    pairwise more than ``2**i`` apart.
    """
    rng = _rng(seed)
    n = g.node_count
    csr = g.to_csr()
    levels = [np.arange(n, dtype=np.int64)]
    i = 0
    while len(levels[-1]) > k:
        cur = levels[-1]
        radius = float(2 ** i)
        blocked = np.zeros(n, dtype=bool)
        chosen = []
        for v in rng.permutation(cur):
            if blocked[v]:
                continue
            chosen.append(v)
            ball = dijkstra(csr, directed=False, indices=v, limit=radius)
            blocked[np.isfinite(ball)] = True
        levels.append(np.sort(np.asarray(chosen, dtype=np.int64)))
        i += 1
    return levels


def sample_mis_filtration(g: Graph, k: int, seed=None) -> np.ndarray:
    _check_k(k, g.node_count)
    rng = _rng(seed)
    levels = mis_levels(g, k, rng)
    last = levels[-1]
    if len(last) == k or len(levels) == 1:
        return last
    prev = levels[-2]
    pool = np.setdiff1d(prev, last)
    extra = rng.choice(pool, size=k - len(last), replace=False)
    return np.concatenate([last, np.sort(extra)]).astype(np.int64)


def _farthest_first(n: int, k: int, chosen: list, mind: np.ndarray,
                    dist_to: Callable[[int], np.ndarray]) -> np.ndarray:
    mind = mind.astype(np.float64).copy()
    taken = np.zeros(n, dtype=bool)
    taken[chosen] = True
    while len(chosen) < k:
        cand = np.where(taken, -np.inf, mind)
        v = int(np.argmax(cand))  # first maximum = smallest id
        chosen.append(v)
        taken[v] = True
        np.minimum(mind, dist_to(v), out=mind)
    return np.asarray(chosen, dtype=np.int64)


def maxmin_sp_extend(g: Graph, k: int, start: list) -> np.ndarray:
    """Extend ``start`` farthest-first in graph distance up to ``k`` pivots."""
    n = g.node_count
    if start:
        mind = mssp_table(g, start).min(axis=0)
    else:
        mind = np.full(n, np.inf)
    return _farthest_first(n, k, list(start), mind, lambda v: sssp(g, v))


def sample_maxmin_sp(g: Graph, k: int, seed=None, first: int | None = None) -> np.ndarray:
    _check_k(k, g.node_count)
    if first is None:
        first = int(_rng(seed).integers(g.node_count))
    return maxmin_sp_extend(g, k, [first])


def sample_maxmin_euclid(layout: np.ndarray, k: int, seed=None, first: int | None = None) -> np.ndarray:
    x = np.asarray(layout, dtype=np.float64)
    n = len(x)
    _check_k(k, n)
    if first is None:
        first = int(_rng(seed).integers(n))

    def dist_to(v):
        return np.linalg.norm(x - x[v], axis=1)

    return _farthest_first(n, k, [first], dist_to(first), dist_to)


def sample_maxmin_random_sp(g: Graph, k: int, seed=None, start: list | None = None) -> np.ndarray:
    n = g.node_count
    _check_k(k, n)
    rng = _rng(seed)
    chosen = list(start) if start else [int(rng.integers(n))]
    mind = mssp_table(g, chosen).min(axis=0)
    taken = np.zeros(n, dtype=bool)
    taken[chosen] = True
    while len(chosen) < k:
        wts = np.where(taken, 0.0, mind)
        total = wts.sum()
        if total > 0:
            v = int(rng.choice(n, p=wts / total))
        else:
            v = int(rng.choice(np.flatnonzero(~taken)))
        chosen.append(v)
        taken[v] = True
        np.minimum(mind, sssp(g, v), out=mind)
    return np.asarray(chosen, dtype=np.int64)


def _sq_dists(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    d = (a * a).sum(1)[:, None] - 2.0 * a @ b.T + (b * b).sum(1)[None, :]
    return np.maximum(d, 0.0)


def _kmeanspp(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = len(x)
    centers = [int(rng.integers(n))]
    d2 = ((x - x[centers[0]]) ** 2).sum(1)
    for _ in range(1, k):
        total = d2.sum()
        if total > 0:
            c = int(rng.choice(n, p=d2 / total))
        else:
            c = int(np.flatnonzero(~np.isin(np.arange(n), centers))[0])
        centers.append(c)
        np.minimum(d2, ((x - x[c]) ** 2).sum(1), out=d2)
    return x[centers].copy()


@dataclass
class LloydResult:
    centroids: np.ndarray
    assignment: np.ndarray
    sse_history: list
    iterations: int


def lloyd(x: np.ndarray, centroids: np.ndarray, max_iters: int) -> LloydResult:
    """Plain Lloyd iterations; an empty cluster keeps its previous centroid."""
    x = np.asarray(x, dtype=np.float64)
    c = np.array(centroids, dtype=np.float64)
    k = len(c)
    assign = np.argmin(_sq_dists(x, c), axis=1)
    sse = [float(((x - c[assign]) ** 2).sum())]
    it = 0
    for it in range(1, max_iters + 1):
        counts = np.bincount(assign, minlength=k)
        sums = np.zeros_like(c)
        np.add.at(sums, assign, x)
        nonempty = counts > 0
        c[nonempty] = sums[nonempty] / counts[nonempty, None]
        new_assign = np.argmin(_sq_dists(x, c), axis=1)
        sse.append(float(((x - c[new_assign]) ** 2).sum()))
        if np.array_equal(new_assign, assign):
            assign = new_assign
            break
        assign = new_assign
    return LloydResult(c, assign, sse, it)


def cluster_representatives(x: np.ndarray, res: LloydResult, k: int) -> np.ndarray:
    """Member nearest each centroid (ties by id); gaps filled by farthest nodes."""
    x = np.asarray(x, dtype=np.float64)
    n = len(x)
    d2 = ((x - res.centroids[res.assignment]) ** 2).sum(1)
    reps = []
    taken = np.zeros(n, dtype=bool)
    for c in range(len(res.centroids)):
        members = np.flatnonzero(res.assignment == c)
        if members.size == 0:
            continue
        v = int(members[np.argmin(d2[members])])
        reps.append(v)
        taken[v] = True
    # empty clusters are re-seeded with the node farthest from its centroid
    while len(reps) < k:
        v = int(np.argmax(np.where(taken, -np.inf, d2)))
        reps.append(v)
        taken[v] = True
    return np.asarray(reps, dtype=np.int64)


def sample_kmeans_layout(layout: np.ndarray, k: int, seed=None, max_iters: int = 50) -> np.ndarray:
    x = np.asarray(layout, dtype=np.float64)
    _check_k(k, len(x))
    if max_iters < 1:
        raise ConfigError("max_iters must be >= 1")
    rng = _rng(seed)
    res = lloyd(x, _kmeanspp(x, k, rng), max_iters)
    return cluster_representatives(x, res, k)


def kmeans_sp_features(g: Graph, seeds: np.ndarray) -> np.ndarray:
    return mssp_table(g, seeds).T.copy()


def sample_kmeans_sp(g: Graph, k: int, seed=None, max_iters: int = 50,
                     return_trace: bool = False):
    _check_k(k, g.node_count)
    if max_iters < 1:
        raise ConfigError("max_iters must be >= 1")
    seeds = sample_maxmin_sp(g, k, seed)
    feats = kmeans_sp_features(g, seeds)
    res = lloyd(feats, feats[seeds], max_iters)
    reps = cluster_representatives(feats, res, k)
    if return_trace:
        return reps, res
    return reps


def sample_kmeans_plus_maxmin_sp(g: Graph, layout: np.ndarray, k: int, seed=None,
                                 max_iters: int = 50) -> np.ndarray:
    _check_k(k, g.node_count)
    if k < 2:
        raise SizeError("k-means + max/min sp needs k >= 2")
    half = sample_kmeans_layout(layout, k // 2, seed, max_iters)
    return maxmin_sp_extend(g, k, [int(v) for v in half])


def sample(g: Graph, cfg: SamplerConfig, rng=None) -> PivotSet:
    """Dispatch on ``cfg.strategy``; ``rng`` overrides the config seed."""
    rng = _rng(cfg.seed if rng is None else rng)
    s, k = cfg.strategy, cfg.k
    x = cfg.initial_layout
    if s == "random":
        nodes = sample_random(g, k, rng)
    elif s == "mis":
        nodes = sample_mis_filtration(g, k, rng)
    elif s == "maxmin-euclid":
        nodes = sample_maxmin_euclid(x, k, rng)
    elif s == "maxmin-sp":
        nodes = sample_maxmin_sp(g, k, rng)
    elif s == "maxmin-random-sp":
        nodes = sample_maxmin_random_sp(g, k, rng)
    elif s == "kmeans-layout":
        nodes = sample_kmeans_layout(x, k, rng, cfg.kmeans_max_iters)
    elif s == "kmeans-sp":
        nodes = sample_kmeans_sp(g, k, rng, cfg.kmeans_max_iters)
    else:
        nodes = sample_kmeans_plus_maxmin_sp(g, x, k, rng, cfg.kmeans_max_iters)
    return PivotSet(tuple(int(v) for v in nodes), s, cfg.seed)
