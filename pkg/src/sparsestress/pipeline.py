"""End-to-end layout runs: PivotMDS init, rescale, pivot sampling, solver."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import sampling
from .errors import ConfigError
from .graph import Graph
from .metrics import PairTable, optimal_rescale
from .pivotmds import pivot_mds, rescale_to_edge_weights
from .solvers import (
    SolverConfig,
    SolverResult,
    SparseModel,
    solve_1_stress,
    solve_full_stress,
    solve_sparse_stress,
)

ALGORITHMS = ("full", "sparse", "one-stress", "pivotmds-only")
INIT_PIVOTS = 200


@dataclass
class LayoutRun:
    layout: np.ndarray
    algorithm: str
    seed: int
    result: SolverResult | None = None
    pivots: np.ndarray | None = None
    elapsed_ms: float = 0.0
    init_layout: np.ndarray | None = field(default=None, repr=False)


def streams(seed: int) -> tuple[np.random.Generator, np.random.Generator]:
    """Independent generators for initialization and pivot sampling."""
    init_ss, sample_ss = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(init_ss), np.random.default_rng(sample_ss)


def initial_layout(g: Graph, seed_or_rng, dim: int = 2, pivots: int = INIT_PIVOTS) -> np.ndarray:
    if g.node_count == 1:
        return np.zeros((1, dim))
    x = pivot_mds(g, min(pivots, g.node_count), seed_or_rng, dim).layout
    return rescale_to_edge_weights(x, g)


def run_layout(g: Graph, algorithm: str, seed: int = 0, k: int | None = None,
               sampler: str = "kmeans-sp", cfg: SolverConfig | None = None,
               init_pivots: int = INIT_PIVOTS, dcond: np.ndarray | None = None) -> LayoutRun:
    if algorithm not in ALGORITHMS:
        raise ConfigError(f"unknown algorithm {algorithm!r}; choose from {', '.join(ALGORITHMS)}")
    cfg = cfg or SolverConfig(seed=seed)
    init_rng, sample_rng = streams(seed)
    t0 = time.perf_counter()
    x0 = initial_layout(g, init_rng, cfg.dim, init_pivots)
    run = LayoutRun(layout=x0, algorithm=algorithm, seed=seed, init_layout=x0)
    if algorithm == "pivotmds-only":
        pass
    elif algorithm == "full":
        run.result = solve_full_stress(g, x0, cfg, dcond=dcond)
    elif algorithm == "one-stress":
        run.result = solve_1_stress(g, x0, cfg)
    else:
        if k is None or k < 1:
            raise ConfigError("sparse stress needs --k >= 1")
        if k > g.node_count:
            raise ConfigError(f"k={k} exceeds n={g.node_count}")
        scfg = sampling.SamplerConfig(sampler, k, seed, initial_layout=x0)
        piv = sampling.sample(g, scfg, sample_rng).as_array()
        run.pivots = piv
        run.result = solve_sparse_stress(g, piv, x0, cfg, model=SparseModel.build(g, piv))
    if run.result is not None:
        run.layout = run.result.layout
    run.elapsed_ms = (time.perf_counter() - t0) * 1e3
    return run


def evaluated_stress(x: np.ndarray, pairs: PairTable) -> float:
    """Stress after optimal rescaling, the figure runs are compared by."""
    return optimal_rescale(x, pairs)[1]


def median_index(values) -> int:
    """Index of the (lower) median value."""
    order = np.argsort(np.asarray(values), kind="stable")
    return int(order[(len(order) - 1) // 2])
