"""Stress majorization solvers: full stress, sparse (pivot) stress and 1-stress.

All three share the same sweep loop: nodes are moved one at a time in id
order and every move is visible to the nodes after it.  Hot loops are numba
kernels operating on plain arrays.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field

import numba
import numpy as np

from .distances import (
    PivotDistances,
    Regions,
    adapted_weight_table,
    all_pairs,
    build_regions,
    mssp,
)
from .errors import ConfigError, DisconnectedGraphError
from .graph import Graph

FULL_MAX_ITERS = 500
SPARSE_MAX_ITERS = 200
DEFAULT_EPS = 1e-4
COINCIDENT = 1e-9
FULL_MEMORY_WARN_N = 20_000


@dataclass(frozen=True)
class SolverConfig:
    max_iters: int | None = None
    eps: float = DEFAULT_EPS
    seed: int = 0
    dim: int = 2

    def __post_init__(self):
        if self.max_iters is not None and self.max_iters < 1:
            raise ConfigError("max_iters must be >= 1")
        if not self.eps > 0:
            raise ConfigError("eps must be > 0")
        if self.dim < 1:
            raise ConfigError("dim must be >= 1")

    def iters(self, default: int) -> int:
        return default if self.max_iters is None else self.max_iters


@dataclass
class TraceRow:
    sweep: int
    stress: float
    relative_change: float
    elapsed_ms: float


@dataclass
class SolverResult:
    layout: np.ndarray
    trace: list = field(default_factory=list)
    initial_stress: float = float("nan")
    converged: bool = False

    @property
    def sweeps(self) -> int:
        return len(self.trace)

    @property
    def final_stress(self) -> float:
        return self.trace[-1].stress if self.trace else self.initial_stress

    def stress_series(self) -> np.ndarray:
        return np.array([self.initial_stress] + [r.stress for r in self.trace])


# --------------------------------------------------------------------------
# numba kernels


@numba.njit(cache=True, inline="always")
def _mix64(z):
    z = (z + np.uint64(0x9E3779B97F4A7C15))
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


@numba.njit(cache=True, nogil=True)
def _pair_direction(i, j, dim, out):
    """Deterministic unit vector for the ordered pair ``(i, j)``."""
    state = _mix64(np.uint64(i) * np.uint64(0x100000001B3) + np.uint64(j))
    norm2 = 0.0
    for a in range(dim):
        state = _mix64(state)
        v = (state >> np.uint64(11)) * (1.0 / 9007199254740992.0) * 2.0 - 1.0
        out[a] = v
        norm2 += v * v
    if norm2 == 0.0:
        out[0] = 1.0
        norm2 = 1.0
    inv = 1.0 / np.sqrt(norm2)
    for a in range(dim):
        out[a] *= inv


@numba.njit(cache=True, nogil=True)
def _condensed_index(i, j, n):
    if i > j:
        i, j = j, i
    return i * n - (i * (i + 1)) // 2 + j - i - 1


# The majorization update is written out in each kernel: a helper call in the
# inner loop is not inlined across cached functions and costs ~5x.


@numba.njit(cache=True, nogil=True)
def _full_sweep_nd(x, dcond):
    n, dim = x.shape
    num = np.empty(dim)
    u = np.empty(dim)
    for i in range(n):
        num[:] = 0.0
        den = 0.0
        for j in range(n):
            if j == i:
                continue
            d = dcond[_condensed_index(i, j, n)]
            w = 1.0 / (d * d)
            dist2 = 0.0
            for a in range(dim):
                t = x[i, a] - x[j, a]
                dist2 += t * t
            dist = np.sqrt(dist2)
            if dist < COINCIDENT:
                _pair_direction(i, j, dim, u)
                for a in range(dim):
                    num[a] += w * (x[j, a] + d * u[a])
            else:
                s = d / dist
                for a in range(dim):
                    num[a] += w * (x[j, a] + s * (x[i, a] - x[j, a]))
            den += w
        if den > 0.0:
            for a in range(dim):
                x[i, a] = num[a] / den


@numba.njit(cache=True, nogil=True)
def full_stress_value(x, dcond):
    n, dim = x.shape
    total = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            d = dcond[_condensed_index(i, j, n)]
            s = 0.0
            for a in range(dim):
                t = x[i, a] - x[j, a]
                s += t * t
            r = np.sqrt(s) - d
            total += r * r / (d * d)
    return total


@numba.njit(cache=True, nogil=True)
def _sparse_sweep_nd(x, indptr, indices, lengths, pivots, pdist, wprime, use_pivots):
    n, dim = x.shape
    k = pivots.shape[0]
    num = np.empty(dim)
    u = np.empty(dim)
    mark = np.full(n, -1, np.int64)
    for i in range(n):
        num[:] = 0.0
        den = 0.0
        for e in range(indptr[i], indptr[i + 1]):
            j = indices[e]
            d = lengths[e]
            w = 1.0 / (d * d)
            dist2 = 0.0
            for a in range(dim):
                t = x[i, a] - x[j, a]
                dist2 += t * t
            dist = np.sqrt(dist2)
            if dist < COINCIDENT:
                _pair_direction(i, j, dim, u)
                for a in range(dim):
                    num[a] += w * (x[j, a] + d * u[a])
            else:
                s = d / dist
                for a in range(dim):
                    num[a] += w * (x[j, a] + s * (x[i, a] - x[j, a]))
            den += w
            mark[j] = i
        if use_pivots:
            for q in range(k):
                p = pivots[q]
                if p == i or mark[p] == i:
                    continue
                w = wprime[i, q]
                d = pdist[i, q]
                dist2 = 0.0
                for a in range(dim):
                    t = x[i, a] - x[p, a]
                    dist2 += t * t
                dist = np.sqrt(dist2)
                if dist < COINCIDENT:
                    _pair_direction(i, p, dim, u)
                    for a in range(dim):
                        num[a] += w * (x[p, a] + d * u[a])
                else:
                    s = d / dist
                    for a in range(dim):
                        num[a] += w * (x[p, a] + s * (x[i, a] - x[p, a]))
                den += w
        if den > 0.0:
            for a in range(dim):
                x[i, a] = num[a] / den


# Two-dimensional copies of the sweeps with the coordinate loop unrolled;
# the generic kernels above are about 2-3x slower for dim = 2.


@numba.njit(cache=True, nogil=True)
def _full_sweep_2d(x, dcond):
    n = x.shape[0]
    u = np.empty(2)
    for i in range(n):
        nx = 0.0
        ny = 0.0
        den = 0.0
        for j in range(n):
            if j == i:
                continue
            d = dcond[_condensed_index(i, j, n)]
            w = 1.0 / (d * d)
            dx = x[i, 0] - x[j, 0]
            dy = x[i, 1] - x[j, 1]
            dist = np.sqrt(dx * dx + dy * dy)
            if dist < COINCIDENT:
                _pair_direction(i, j, 2, u)
                nx += w * (x[j, 0] + d * u[0])
                ny += w * (x[j, 1] + d * u[1])
            else:
                s = d / dist
                nx += w * (x[j, 0] + s * dx)
                ny += w * (x[j, 1] + s * dy)
            den += w
        if den > 0.0:
            x[i, 0] = nx / den
            x[i, 1] = ny / den


@numba.njit(cache=True, nogil=True)
def _sparse_sweep_2d(x, indptr, indices, lengths, pivots, pdist, wprime, use_pivots):
    n = x.shape[0]
    k = pivots.shape[0]
    u = np.empty(2)
    mark = np.full(n, -1, np.int64)
    for i in range(n):
        nx = 0.0
        ny = 0.0
        den = 0.0
        for e in range(indptr[i], indptr[i + 1]):
            j = indices[e]
            d = lengths[e]
            w = 1.0 / (d * d)
            dx = x[i, 0] - x[j, 0]
            dy = x[i, 1] - x[j, 1]
            dist = np.sqrt(dx * dx + dy * dy)
            if dist < COINCIDENT:
                _pair_direction(i, j, 2, u)
                nx += w * (x[j, 0] + d * u[0])
                ny += w * (x[j, 1] + d * u[1])
            else:
                s = d / dist
                nx += w * (x[j, 0] + s * dx)
                ny += w * (x[j, 1] + s * dy)
            den += w
            mark[j] = i
        if use_pivots:
            for q in range(k):
                p = pivots[q]
                if p == i or mark[p] == i:
                    continue
                w = wprime[i, q]
                d = pdist[i, q]
                dx = x[i, 0] - x[p, 0]
                dy = x[i, 1] - x[p, 1]
                dist = np.sqrt(dx * dx + dy * dy)
                if dist < COINCIDENT:
                    _pair_direction(i, p, 2, u)
                    nx += w * (x[p, 0] + d * u[0])
                    ny += w * (x[p, 1] + d * u[1])
                else:
                    s = d / dist
                    nx += w * (x[p, 0] + s * dx)
                    ny += w * (x[p, 1] + s * dy)
                den += w
        if den > 0.0:
            x[i, 0] = nx / den
            x[i, 1] = ny / den


def full_sweep(x: np.ndarray, dcond: np.ndarray) -> None:
    """One in-place Gauss-Seidel sweep of the full stress update."""
    (_full_sweep_2d if x.shape[1] == 2 else _full_sweep_nd)(x, dcond)


def sparse_sweep(x, indptr, indices, lengths, pivots, pdist, wprime, use_pivots) -> None:
    """One in-place sweep over neighbor terms and (optionally) pivot terms."""
    kernel = _sparse_sweep_2d if x.shape[1] == 2 else _sparse_sweep_nd
    kernel(x, indptr, indices, lengths, pivots, pdist, wprime, use_pivots)


@numba.njit(cache=True, nogil=True)
def sparse_objective(x, indptr, indices, lengths, pivots, pdist, wprime, use_pivots):
    n, dim = x.shape
    k = pivots.shape[0]
    mark = np.full(n, -1, np.int64)
    total = 0.0
    for i in range(n):
        for e in range(indptr[i], indptr[i + 1]):
            j = indices[e]
            mark[j] = i
            if j > i:
                d = lengths[e]
                s = 0.0
                for a in range(dim):
                    t = x[i, a] - x[j, a]
                    s += t * t
                r = np.sqrt(s) - d
                total += r * r / (d * d)
        if use_pivots:
            for q in range(k):
                p = pivots[q]
                if p == i or mark[p] == i:
                    continue
                s = 0.0
                for a in range(dim):
                    t = x[i, a] - x[p, a]
                    s += t * t
                r = np.sqrt(s) - pdist[i, q]
                total += wprime[i, q] * r * r
    return total


# --------------------------------------------------------------------------


def relative_positional_change(x_prev: np.ndarray, x_next: np.ndarray) -> float:
    """Largest node displacement relative to the previous bounding-box diagonal."""
    x_prev = np.asarray(x_prev, dtype=np.float64)
    x_next = np.asarray(x_next, dtype=np.float64)
    if x_prev.shape != x_next.shape:
        raise ValueError("layouts differ in shape")
    diag = np.linalg.norm(x_prev.max(axis=0) - x_prev.min(axis=0))
    moved = np.linalg.norm(x_next - x_prev, axis=1).max() if len(x_prev) else 0.0
    if diag == 0:
        return float("inf")
    return float(moved / diag)


def _iterate(x0, sweep, objective, max_iters, eps) -> SolverResult:
    x = np.array(x0, dtype=np.float64, order="C")
    if not np.all(np.isfinite(x)):
        raise ConfigError("initial layout contains non-finite coordinates")
    res = SolverResult(layout=x, initial_stress=objective(x))
    for it in range(1, max_iters + 1):
        prev = x.copy()
        t0 = time.perf_counter()
        sweep(x)
        elapsed = (time.perf_counter() - t0) * 1e3
        change = relative_positional_change(prev, x)
        res.trace.append(TraceRow(it, objective(x), change, elapsed))
        if change <= eps:
            res.converged = True
            break
    return res


def condensed_distances(g: Graph) -> np.ndarray:
    n = g.node_count
    if n > FULL_MEMORY_WARN_N:
        warnings.warn(f"full stress on n={n} needs {n * (n - 1) // 2 * 8 / 2**30:.1f} GiB of distances")
    d = all_pairs(g)
    return d[np.triu_indices(n, 1)].copy()


def _check_x0(g: Graph, x0) -> None:
    if len(x0) != g.node_count:
        raise ConfigError(f"initial layout has {len(x0)} rows, graph has {g.node_count} nodes")
    if not g.is_connected():
        raise DisconnectedGraphError("stress solvers need a connected graph")


def solve_full_stress(g: Graph, x0: np.ndarray, cfg: SolverConfig = SolverConfig(),
                      dcond: np.ndarray | None = None) -> SolverResult:
    _check_x0(g, x0)
    if dcond is None:
        dcond = condensed_distances(g)
    return _iterate(
        x0,
        lambda x: full_sweep(x, dcond),
        lambda x: full_stress_value(x, dcond),
        cfg.iters(FULL_MAX_ITERS),
        cfg.eps,
    )


@dataclass(frozen=True, eq=False)
class SparseModel:
    """Pivot distances, regions and adapted weights for one pivot set.

    The solver reads one node's row of pivot distances and weights at a
    time, so ``pdist`` and ``wprime`` are stored node-major (``n x k``).
    """

    pd: PivotDistances
    regions: Regions
    pdist: np.ndarray  # (n, k)
    wprime: np.ndarray  # (n, k)

    @classmethod
    def build(cls, g: Graph, pivots) -> "SparseModel":
        pd = mssp(g, pivots)
        regions = build_regions(pd)
        wprime = np.ascontiguousarray(adapted_weight_table(pd, regions).T)
        return cls(pd, regions, np.ascontiguousarray(pd.dist.T), wprime)

    def kernel_args(self, g: Graph) -> tuple:
        piv = np.ascontiguousarray(self.pd.pivots, dtype=np.int64)
        return (g.indptr, g.indices, g.lengths, piv, self.pdist, self.wprime, True)

    def nbytes(self) -> int:
        r = self.regions
        return sum(a.nbytes for a in (self.pd.dist, self.pdist, self.wprime, r.owner, r.members,
                                      r.sorted_member_dist, r.member_ptr, self.pd.pivots))


def solve_sparse_stress(g: Graph, pivots, x0: np.ndarray, cfg: SolverConfig = SolverConfig(),
                        model: SparseModel | None = None) -> SolverResult:
    _check_x0(g, x0)
    if model is None:
        if len(pivots) == 0:
            raise ConfigError("sparse stress needs k >= 1 pivots")
        model = SparseModel.build(g, pivots)
    args = model.kernel_args(g)
    return _iterate(
        x0,
        lambda x: sparse_sweep(x, *args),
        lambda x: sparse_objective(x, *args),
        cfg.iters(SPARSE_MAX_ITERS),
        cfg.eps,
    )


def solve_1_stress(g: Graph, x0: np.ndarray, cfg: SolverConfig = SolverConfig()) -> SolverResult:
    _check_x0(g, x0)
    piv = np.zeros(0, dtype=np.int64)
    empty = np.zeros((g.node_count, 0))
    args = (g.indptr, g.indices, g.lengths, piv, empty, empty, False)
    return _iterate(
        x0,
        lambda x: sparse_sweep(x, *args),
        lambda x: sparse_objective(x, *args),
        cfg.iters(SPARSE_MAX_ITERS),
        cfg.eps,
    )


def edge_stress(g: Graph, x: np.ndarray) -> float:
    src, dst, d = g.edge_arrays()
    r = np.linalg.norm(x[src] - x[dst], axis=1) - d
    return float((r * r / (d * d)).sum())
