"""Sparse stress graph layout.

Stress majorization restricted to a pivot set with region-adapted weights,
together with the full stress, 1-stress and PivotMDS baselines, eight pivot
sampling strategies and layout-similarity metrics.
"""

from .distances import PivotDistances, Regions, adapted_weight, build_regions, mssp
from .graph import (
    Graph,
    GraphStats,
    generate,
    largest_component,
    parse_edge_list,
    parse_matrix_market,
    stats,
)
from .metrics import (
    MetricReport,
    error_histogram,
    gabriel_jaccard,
    hull_error,
    normalized_stress,
    optimal_rescale,
    procrustes_statistic,
    stress,
)
from .geometry import gabriel_graph
from .pipeline import run_layout
from .pivotmds import pivot_mds, rescale_to_edge_weights
from .sampling import PivotSet, SamplerConfig, sample
from .solvers import (
    SolverConfig,
    relative_positional_change,
    solve_1_stress,
    solve_full_stress,
    solve_sparse_stress,
)

__version__ = "0.1.0"
